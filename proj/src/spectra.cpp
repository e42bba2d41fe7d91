#include "obslab/spectra.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace obslab {

Potential Potential::monomial(int m) {
    require(m >= 1, "monomial potential needs m >= 1");
    Potential p;
    p.kind_ = Kind::monomial;
    p.m_ = m;
    return p;
}

Potential Potential::shifted_power(double C, double c) {
    require(C > 0 && c >= 1, "shifted power needs C > 0 and c >= 1");
    Potential p;
    p.kind_ = Kind::shifted_power;
    p.C_ = C;
    p.c_ = c;
    return p;
}

double Potential::operator()(double x) const {
    if (is_monomial()) {
        const double x2 = x * x;
        double v = 1;
        for (int i = 0; i < m_; ++i) v *= x2;
        return v;
    }
    return C_ * std::pow(1 + x * x, c_);
}

double Potential::turning_point(double lambda) const {
    if (lambda <= 0) return 0;
    if (is_monomial()) return std::pow(lambda, 1.0 / (2 * m_));
    if (lambda <= C_) return 0;
    return std::sqrt(std::pow(lambda / C_, 1.0 / c_) - 1);
}

std::string Potential::describe() const {
    std::ostringstream os;
    if (is_monomial())
        os << "x^" << 2 * m_;
    else
        os << C_ << "*(1+x^2)^" << c_;
    return os.str();
}

std::vector<double> Grid::nodes() const {
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = node(i);
    return v;
}

const char* to_string(Parity p) { return p == Parity::even ? "even" : "odd"; }

std::vector<double> SpectrumTable::lambdas() const {
    std::vector<double> v;
    v.reserve(pairs.size());
    for (const auto& p : pairs) v.push_back(p.lambda);
    return v;
}

SymTridiagonal assemble(const Potential& V, const Grid& grid) {
    const double h = grid.h();
    const double ih2 = 1.0 / (h * h);
    std::vector<double> diag(grid.N), off(grid.N - 1, -ih2);
    for (std::size_t i = 0; i < grid.N; ++i) diag[i] = 2 * ih2 + V(grid.node(i));
    return SymTridiagonal(std::move(diag), std::move(off));
}

double grid_dot(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s * grid.h();
}

std::size_t sign_changes(const std::vector<double>& phi) {
    double peak = 0;
    for (double v : phi) peak = std::max(peak, std::fabs(v));
    const double floor = 1e-10 * peak;
    std::size_t changes = 0;
    int last = 0;
    for (double v : phi) {
        if (std::fabs(v) <= floor) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

double parity_defect(const Grid& grid, const EigenPair& pair) {
    if (!pair.parity) return 0;
    const double s = *pair.parity == Parity::even ? 1.0 : -1.0;
    const std::size_t n = pair.phi.size();
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = pair.phi[i] - s * pair.phi[n - 1 - i];
        d += e * e;
    }
    return d * grid.h();
}

double weyl_b(int m) { return std::pow(pi / beta_function(1.5, 1.0 / (2 * m)), 1.0 / (m + 1)); }

double semiclassical_eigenvalue(const Potential& V, int k) {
    require(k >= 1, "eigenvalue index starts at 1");
    const double target = pi * (k - 0.5);
    if (V.is_monomial()) {
        const int m = V.m();
        return std::pow(m * target / beta_function(1.5, 1.0 / (2 * m)), 2.0 * m / (m + 1));
    }
    auto action = [&](double lambda) {
        const double xt = V.turning_point(lambda);
        if (xt <= 0) return 0.0;
        return integrate_adaptive(
            [&](double th) {
                const double x = xt * std::sin(th);
                return std::sqrt(std::max(0.0, lambda - V(x))) * xt * std::cos(th);
            },
            -pi / 2, pi / 2, 1e-10);
    };
    double lo = V(0), hi = std::max(2 * V(0), 1.0);
    while (action(hi) < target) hi *= 2;
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (action(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> hermite_all(int K, double x) {
    std::vector<double> v(std::max(K, 0));
    if (K <= 0) return v;
    v[0] = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (K > 1) v[1] = std::sqrt(2.0) * x * v[0];
    for (int n = 1; n + 1 < K; ++n)
        v[n + 1] = std::sqrt(2.0 / (n + 1)) * x * v[n] - std::sqrt(static_cast<double>(n) / (n + 1)) * v[n - 1];
    return v;
}

double hermite_exact(int k, double x) {
    require(k >= 1, "hermite index starts at 1");
    return hermite_all(k, x).back();
}

namespace {

struct LevelResult {
    std::vector<double> lambdas;
    std::vector<std::vector<double>> vectors;  // unit l2 norm
};

LevelResult solve_level(const SymTridiagonal& A, int K, const std::vector<double>* previous,
                        double upper_guess, unsigned seed) {
    LevelResult out;
    out.lambdas.resize(K);
    out.vectors.resize(K);
    const std::size_t n = A.size();
    for (int k = 0; k < K; ++k) {
        double lo, hi;
        if (previous) {
            const double p = (*previous)[k];
            lo = p - 0.02 * std::fabs(p) - 1e-6;
            hi = p + 0.02 * std::fabs(p) + 1e-6;
        } else {
            lo = k > 0 ? out.lambdas[k - 1] : 0.0;
            hi = upper_guess;
        }
        const double guess = A.bisect(static_cast<std::size_t>(k), lo, hi, 1e-10);

        std::mt19937_64 rng(seed + static_cast<unsigned>(k));
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        std::vector<double> start(n);
        for (auto& v : start) v = unif(rng);
        auto x = A.inverse_iteration(guess, std::move(start), 2);

        // Gram-Schmidt only when neighbours are nearly degenerate
        for (int j = 0; j < k; ++j) {
            if (std::fabs(guess - out.lambdas[j]) >= 1e-6 * std::max(1.0, std::fabs(guess))) continue;
            double d = 0;
            for (std::size_t i = 0; i < n; ++i) d += x[i] * out.vectors[j][i];
            for (std::size_t i = 0; i < n; ++i) x[i] -= d * out.vectors[j][i];
            double nn = 0;
            for (double v : x) nn += v * v;
            nn = std::sqrt(nn);
            for (double& v : x) v /= nn;
        }
        out.lambdas[k] = A.rayleigh_quotient(x);
        out.vectors[k] = std::move(x);
    }
    return out;
}

std::size_t odd_nodes_for(double X, double h) {
    auto N = static_cast<std::size_t>(std::ceil(2 * X / h)) - 1;
    if (N % 2 == 0) ++N;
    return std::max<std::size_t>(N, 3);
}

double band_mass(const Grid& grid, const std::vector<double>& unit, double band) {
    const double edge = (1 - band) * grid.X;
    double s = 0, total = 0;
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double v = unit[i] * unit[i];
        total += v;
        if (std::fabs(grid.node(i)) >= edge) s += v;
    }
    return s / total;
}

void finish_pair(const Potential& V, const Grid& grid, const SymTridiagonal& A, int k, double lambda,
                 std::vector<double> v, EigenPair& pair) {
    pair.k = k;
    pair.lambda = lambda;
    pair.residual = A.residual(v, lambda);
    const double scale = 1.0 / std::sqrt(grid.h());
    for (double& x : v) x *= scale;

    double peak = 0;
    for (double x : v) peak = std::max(peak, std::fabs(x));
    for (std::size_t i = grid.center(); i < grid.N; ++i) {
        if (std::fabs(v[i]) > 0.5 * peak) {
            if (v[i] < 0)
                for (double& x : v) x = -x;
            break;
        }
    }
    pair.norm_residual = std::fabs(grid_dot(grid, v, v) - 1);
    if (V.is_monomial()) {
        pair.mu = std::pow(lambda, 1.0 / (2 * V.m()));
        pair.parity = (k % 2 == 1) ? Parity::even : Parity::odd;
    }
    pair.phi = std::move(v);
}

void fill_gap_stats(SpectrumTable& t) {
    if (t.pairs.size() < 2) return;
    t.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < t.pairs.size(); ++i)
        t.min_gap = std::min(t.min_gap, t.pairs[i + 1].lambda - t.pairs[i].lambda);
    if (t.pairs.size() >= 10) t.gap_tail_slope = gap_profile(t).tail_slope;
}

}  // namespace

SpectrumTable solve_spectrum(const Potential& V, int K, double accuracy, const SolveOptions& opts) {
    require(K >= 1, "K must be at least 1");
    require(accuracy > 0, "accuracy must be positive");

    const double lambda_est = semiclassical_eigenvalue(V, K);
    double X = 1.5 * V.turning_point(lambda_est) + 10;
    const double h0 = std::min(0.05, 0.3 / std::sqrt(lambda_est));
    const double upper_guess = 2 * lambda_est + 10;

    for (int enlarge = 0; enlarge <= opts.max_enlargements; ++enlarge, X *= 1.25) {
        SpectrumTable t;
        t.potential = V;
        t.accuracy = accuracy;
        if (V.is_monomial()) t.weyl_b = weyl_b(V.m());

        Grid grid{X, odd_nodes_for(X, h0)};
        LevelResult current;
        bool truncated_ok = true;
        bool converged = false;
        for (int level = 0; level < opts.max_levels; ++level) {
            if (grid.N > opts.max_nodes) break;
            const SymTridiagonal A = assemble(V, grid);
            const std::vector<double>* prev = t.levels.empty() ? nullptr : &t.levels.back().lambdas;
            current = solve_level(A, K, prev, upper_guess, opts.seed);
            t.levels.push_back({grid.N, grid.h(), current.lambdas});

            if (level == 0) {
                t.boundary_mass = band_mass(grid, current.vectors.back(), opts.boundary_band);
                if (t.boundary_mass > accuracy) {
                    truncated_ok = false;
                    break;
                }
            }
            if (t.levels.size() >= 3) {
                const auto& a = t.levels[t.levels.size() - 2].lambdas;
                const auto& b = t.levels.back().lambdas;
                double change = 0;
                for (int k = 0; k < K; ++k) change = std::max(change, std::fabs(b[k] - a[k]) / std::fabs(b[k]));
                if (change < accuracy) {
                    converged = true;
                    t.grid = grid;
                    for (int k = 0; k < K; ++k) {
                        EigenPair pair;
                        finish_pair(V, grid, A, k + 1, current.lambdas[k], std::move(current.vectors[k]), pair);
                        t.max_residual = std::max(t.max_residual, pair.residual);
                        t.pairs.push_back(std::move(pair));
                    }
                    break;
                }
            }
            grid = Grid{X, 2 * grid.N + 1};
        }
        if (!truncated_ok) continue;
        if (!converged)
            throw Error(ErrorKind::no_convergence, "grid refinement cap reached before eigenvalues settled");

        const std::size_t L = t.levels.size();
        t.order_min = std::numeric_limits<double>::infinity();
        t.order_max = -t.order_min;
        for (int k = 0; k < K; ++k) {
            const double d1 = t.levels[L - 2].lambdas[k] - t.levels[L - 3].lambdas[k];
            const double d2 = t.levels[L - 1].lambdas[k] - t.levels[L - 2].lambdas[k];
            const double order = std::log2(std::fabs(d1 / d2));
            t.order_min = std::min(t.order_min, order);
            t.order_max = std::max(t.order_max, order);
        }
        fill_gap_stats(t);
        return t;
    }
    throw Error(ErrorKind::truncation_too_small, "eigenfunction mass keeps reaching the walls");
}

SpectrumTable hermite_table(int K, const Grid& grid) {
    require(K >= 1, "K must be at least 1");
    SpectrumTable t;
    t.potential = Potential::monomial(1);
    t.grid = grid;
    t.weyl_b = weyl_b(1);
    t.pairs.resize(K);
    for (int k = 0; k < K; ++k) {
        auto& p = t.pairs[k];
        p.k = k + 1;
        p.lambda = 2.0 * k + 1;
        p.mu = std::sqrt(p.lambda);
        p.parity = (k % 2 == 0) ? Parity::even : Parity::odd;
        p.phi.resize(grid.N);
    }
    for (std::size_t i = 0; i < grid.N; ++i) {
        const auto v = hermite_all(K, grid.node(i));
        for (int k = 0; k < K; ++k) t.pairs[k].phi[i] = v[k];
    }
    for (auto& p : t.pairs) p.norm_residual = std::fabs(grid_dot(grid, p.phi, p.phi) - 1);
    fill_gap_stats(t);
    return t;
}

WeylFit check_weyl_law(const SpectrumTable& table) {
    require(table.potential.is_monomial(), "Weyl law check is defined for monomial potentials");
    const int K = static_cast<int>(table.K());
    if (K < 20) throw Error(ErrorKind::insufficient_data, "Weyl fit needs at least 20 eigenvalues");
    const int m = table.potential.m();
    WeylFit fit;
    fit.target_exponent = 2.0 * m / (m + 1);
    const double B = beta_function(1.5, 1.0 / (2 * m));
    fit.target_constant = std::pow(pi / B, fit.target_exponent);
    fit.quantized_constant = std::pow(m * pi / B, fit.target_exponent);
    fit.k_first = K / 2 + 1;
    fit.k_last = K;
    std::vector<double> lx, lxs, ly;
    for (int k = fit.k_first; k <= K; ++k) {
        lx.push_back(std::log(static_cast<double>(k)));
        lxs.push_back(std::log(k - 0.5));
        ly.push_back(std::log(table.pairs[k - 1].lambda));
    }
    const LineFit a = fit_line(lx, ly);
    fit.exponent = a.slope;
    fit.constant = std::exp(a.intercept);
    fit.shifted_exponent = fit_line(lxs, ly).slope;
    for (int k = 1; k <= K; ++k)
        fit.deviations.push_back(table.pairs[k - 1].lambda /
                                     (fit.target_constant * std::pow(k, fit.target_exponent)) -
                                 1);
    return fit;
}

GapProfile gap_profile(const SpectrumTable& table) {
    const int K = static_cast<int>(table.K());
    require(K >= 10, "gap profile needs K >= 10");
    GapProfile g;
    g.min_gap = std::numeric_limits<double>::infinity();
    for (int k = 1; k < K; ++k) {
        const double gap = table.pairs[k].lambda - table.pairs[k - 1].lambda;
        g.gaps.push_back(gap);
        if (gap < g.min_gap) {
            g.min_gap = gap;
            g.min_gap_index = k;
        }
    }
    const double c = table.potential.growth();
    g.target_slope = (c - 1) / (c + 1);
    std::vector<double> lx, ly;
    const int n = K - 1;
    for (int k = n / 2 + 1; k <= n; ++k) {
        lx.push_back(std::log(static_cast<double>(k)));
        ly.push_back(std::log(g.gaps[k - 1]));
    }
    g.tail_slope = fit_line(lx, ly).slope;
    return g;
}

}  // namespace obslab
