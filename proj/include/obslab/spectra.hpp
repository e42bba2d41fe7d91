#pragma once

#include "obslab/tridiag.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace obslab {

class Potential {
public:
    enum class Kind { monomial, shifted_power };

    static Potential monomial(int m);
    // V(x) = C (1 + x^2)^c
    static Potential shifted_power(double C, double c);

    Kind kind() const { return kind_; }
    bool is_monomial() const { return kind_ == Kind::monomial; }
    int m() const { return m_; }
    double C() const { return C_; }
    double c() const { return c_; }
    // growth exponent: V ~ |x|^{2c}
    double growth() const { return is_monomial() ? m_ : c_; }

    double operator()(double x) const;
    // largest x >= 0 with V(x) <= lambda
    double turning_point(double lambda) const;
    std::string describe() const;

private:
    Kind kind_ = Kind::monomial;
    int m_ = 1;
    double C_ = 1;
    double c_ = 1;
};

// Interior nodes x_i = -X + i h, i = 1..N, h = 2X/(N+1). N is kept odd so x = 0 is a node.
struct Grid {
    double X = 0;
    std::size_t N = 0;
    double h() const { return 2 * X / static_cast<double>(N + 1); }
    double node(std::size_t i) const { return -X + static_cast<double>(i + 1) * h(); }  // 0-based
    std::size_t center() const { return N / 2; }
    std::vector<double> nodes() const;
};

enum class Parity { even, odd };
const char* to_string(Parity p);

struct EigenPair {
    int k = 0;
    double lambda = 0;
    std::vector<double> phi;  // values at the interior nodes
    std::optional<double> mu;
    std::optional<Parity> parity;
    double norm_residual = 0;
    double residual = 0;  // ||A phi - lambda phi|| / ||phi||
};

struct RefinementLevel {
    std::size_t N = 0;
    double h = 0;
    std::vector<double> lambdas;
};

struct SpectrumTable {
    Potential potential;
    Grid grid;
    std::vector<EigenPair> pairs;
    double accuracy = 0;
    double weyl_b = 0;  // (pi / B(3/2, 1/(2m)))^{1/(m+1)}, monomial only
    double min_gap = 0;
    double gap_tail_slope = 0;
    std::vector<RefinementLevel> levels;
    double order_min = 0;  // measured convergence order over k on the last three levels
    double order_max = 0;
    double boundary_mass = 0;
    double max_residual = 0;

    std::size_t K() const { return pairs.size(); }
    std::vector<double> lambdas() const;
};

struct SolveOptions {
    int max_levels = 14;
    std::size_t max_nodes = std::size_t(1) << 22;
    int max_enlargements = 8;
    double boundary_band = 0.1;  // outer fraction of [-X, X] checked for leaked mass
    unsigned seed = 12345;
};

SymTridiagonal assemble(const Potential& V, const Grid& grid);

SpectrumTable solve_spectrum(const Potential& V, int K, double accuracy, const SolveOptions& opts = {});

// Exact oscillator eigenpairs sampled on a grid (lambda_k = 2k - 1).
SpectrumTable hermite_table(int K, const Grid& grid);

// Normalized Hermite function of degree k-1.
double hermite_exact(int k, double x);
// phi_1..phi_K at x in one recurrence pass.
std::vector<double> hermite_all(int K, double x);

// Bohr-Sommerfeld estimate: integral of sqrt(lambda - V) over the well = pi (k - 1/2).
double semiclassical_eigenvalue(const Potential& V, int k);

double weyl_b(int m);

struct WeylFit {
    double exponent = 0;
    double constant = 0;
    double target_exponent = 0;
    double target_constant = 0;     // (pi / B(3/2, 1/(2m)))^{2m/(m+1)}
    double quantized_constant = 0;  // (m pi / B(3/2, 1/(2m)))^{2m/(m+1)}
    double shifted_exponent = 0;    // fit against log(k - 1/2)
    int k_first = 0;
    int k_last = 0;
    std::vector<double> deviations;  // r_k against the target law, k = 1..K
};

WeylFit check_weyl_law(const SpectrumTable& table);

struct GapProfile {
    double min_gap = 0;
    int min_gap_index = 0;
    double tail_slope = 0;
    double target_slope = 0;
    std::vector<double> gaps;
};

GapProfile gap_profile(const SpectrumTable& table);

// Trapezoid inner product on the grid (boundary values vanish).
double grid_dot(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b);

std::size_t sign_changes(const std::vector<double>& phi);
double parity_defect(const Grid& grid, const EigenPair& pair);

}  // namespace obslab
