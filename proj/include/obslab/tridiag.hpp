#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace obslab {

// Real symmetric tridiagonal matrix: diag[0..n-1], off[0..n-2].
class SymTridiagonal {
public:
    SymTridiagonal(std::vector<double> diag, std::vector<double> off);

    std::size_t size() const { return diag_.size(); }
    const std::vector<double>& diag() const { return diag_; }
    const std::vector<double>& off() const { return off_; }

    // Number of eigenvalues strictly below x (Sturm sequence).
    std::size_t count_below(double x) const;

    // Gershgorin enclosure of the spectrum.
    std::pair<double, double> bounds() const;

    // Bisection for the eigenvalue with 0-based index `index` inside [lo, hi]; the
    // bracket is widened if it fails to enclose it.
    double bisect(std::size_t index, double lo, double hi, double rel_tol) const;

    void apply(std::span<const double> x, std::span<double> y) const;

    // Inverse iteration with the shifted matrix factorized once (LU, partial pivoting).
    std::vector<double> inverse_iteration(double shift, std::vector<double> start, int iterations) const;

    double rayleigh_quotient(std::span<const double> x) const;
    // ||A x - lambda x|| / ||x||
    double residual(std::span<const double> x, double lambda) const;

private:
    std::vector<double> diag_;
    std::vector<double> off_;
    std::vector<double> off_sq_;
};

}  // namespace obslab
