#include "obslab/tridiag.hpp"

#include "obslab/error.hpp"

#include <cmath>
#include <limits>

namespace obslab {

SymTridiagonal::SymTridiagonal(std::vector<double> diag, std::vector<double> off)
    : diag_(std::move(diag)), off_(std::move(off)) {
    require(!diag_.empty(), "empty tridiagonal matrix");
    require(off_.size() + 1 == diag_.size(), "off-diagonal must have n-1 entries");
    off_sq_.resize(off_.size());
    for (std::size_t i = 0; i < off_.size(); ++i) off_sq_[i] = off_[i] * off_[i];
}

std::size_t SymTridiagonal::count_below(double x) const {
    const std::size_t n = diag_.size();
    const double tiny = std::numeric_limits<double>::min();
    std::size_t count = 0;
    double q = diag_[0] - x;
    if (q == 0) q = -tiny;
    if (q < 0) ++count;
    for (std::size_t i = 1; i < n; ++i) {
        q = diag_[i] - x - off_sq_[i - 1] / q;
        if (q == 0) q = -tiny;
        if (q < 0) ++count;
    }
    return count;
}

std::pair<double, double> SymTridiagonal::bounds() const {
    const std::size_t n = diag_.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0;
        if (i > 0) r += std::fabs(off_[i - 1]);
        if (i + 1 < n) r += std::fabs(off_[i]);
        lo = std::min(lo, diag_[i] - r);
        hi = std::max(hi, diag_[i] + r);
    }
    return {lo, hi};
}

double SymTridiagonal::bisect(std::size_t index, double lo, double hi, double rel_tol) const {
    require(index < size(), "eigenvalue index out of range");
    const auto [glo, ghi] = bounds();
    double width = std::max(hi - lo, 1e-12 * std::max(1.0, std::fabs(hi)));
    while (count_below(lo) > index) {
        lo = std::max(glo, lo - width);
        width *= 2;
        if (lo <= glo) break;
    }
    width = std::max(hi - lo, 1e-12 * std::max(1.0, std::fabs(hi)));
    while (count_below(hi) <= index) {
        hi = std::min(ghi, hi + width);
        width *= 2;
        if (hi >= ghi) break;
    }
    hi = std::min(hi, ghi);
    lo = std::max(lo, glo);
    for (int it = 0; it < 200; ++it) {
        if (hi - lo <= rel_tol * std::max(std::fabs(lo), std::fabs(hi))) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (count_below(mid) > index)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

void SymTridiagonal::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag_.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = diag_[i] * x[i];
        if (i > 0) s += off_[i - 1] * x[i - 1];
        if (i + 1 < n) s += off_[i] * x[i + 1];
        y[i] = s;
    }
}

std::vector<double> SymTridiagonal::inverse_iteration(double shift, std::vector<double> x,
                                                      int iterations) const {
    const std::size_t n = diag_.size();
    require(x.size() == n, "start vector size mismatch");
    // LU of (A - shift I) with row interchanges: U has up to two superdiagonals.
    std::vector<double> dl(off_), d(diag_), du(off_), du2(n, 0.0);
    std::vector<char> swapped(n, 0);
    for (auto& v : d) v -= shift;
    const double scale = std::max(std::fabs(bounds().first), std::fabs(bounds().second));
    const double floor_pivot = std::numeric_limits<double>::epsilon() * std::max(scale, 1.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::fabs(d[i]) >= std::fabs(dl[i])) {
            if (d[i] == 0) d[i] = floor_pivot;
            const double f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            const double f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            const double t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if (i + 2 < n) {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du[i + 1];
            }
            swapped[i] = 1;
        }
    }
    if (d[n - 1] == 0) d[n - 1] = floor_pivot;

    for (int it = 0; it < iterations; ++it) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (swapped[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= dl[i] * x[i];
        }
        x[n - 1] /= d[n - 1];
        if (n >= 2) x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        if (n >= 3)
            for (std::size_t i = n - 2; i-- > 0;)
                x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        double norm = 0;
        for (double v : x) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0) || !std::isfinite(norm))
            throw Error(ErrorKind::no_convergence, "inverse iteration produced a degenerate vector");
        for (double& v : x) v /= norm;
    }
    return x;
}

double SymTridiagonal::rayleigh_quotient(std::span<const double> x) const {
    std::vector<double> y(x.size());
    apply(x, y);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += x[i] * y[i];
        den += x[i] * x[i];
    }
    return num / den;
}

double SymTridiagonal::residual(std::span<const double> x, double lambda) const {
    std::vector<double> y(x.size());
    apply(x, y);
    double r = 0, den = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - lambda * x[i];
        r += e * e;
        den += x[i] * x[i];
    }
    return std::sqrt(r / den);
}

}  // namespace obslab
