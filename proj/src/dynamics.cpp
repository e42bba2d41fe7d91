#include "obslab/dynamics.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"
#include "obslab/observability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace obslab {

namespace {

constexpr Complex I(0, 1);

void check_size(const Grid& grid, const CVec& f) {
    require(f.size() == grid.N, "grid data has the wrong length");
}

}  // namespace

Grid uniform_grid(double X, double h) {
    require(X > 0 && h > 0 && h < X, "grid needs 0 < h < X");
    auto N = static_cast<std::size_t>(std::ceil(2 * X / h)) - 1;
    if (N % 2 == 0) ++N;
    return Grid{X, N};
}

CVec sample(const Grid& grid, const std::function<Complex(double)>& f) {
    CVec v(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) v[i] = f(grid.node(i));
    return v;
}

double l2_norm(const Grid& grid, const CVec& f) {
    check_size(grid, f);
    double s = 0;
    for (const auto& v : f) s += std::norm(v);
    return std::sqrt(s * grid.h());
}

double l2_distance(const Grid& grid, const CVec& a, const CVec& b) {
    check_size(grid, a);
    check_size(grid, b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
    return std::sqrt(s * grid.h());
}

double modulus_distance(const Grid& grid, const CVec& a, const CVec& b) {
    check_size(grid, a);
    check_size(grid, b);
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i]) - std::abs(b[i]);
        s += d * d;
    }
    return std::sqrt(s * grid.h());
}

double mass_on(const RealSet& set, const Grid& grid, const CVec& f) {
    check_size(grid, f);
    const auto w = set_weights(set, grid);
    double s = 0;
    for (std::size_t i = 0; i < f.size(); ++i) s += w[i] * std::norm(f[i]);
    return s;
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::eigen: return "eigen";
        case Provenance::mehler: return "mehler";
        case Provenance::resonant: return "resonant";
    }
    return "?";
}

PropagatorState evolve_eigen(const CVec& f, double t, const SpectrumTable& table, double max_defect) {
    require(table.potential.is_monomial() && table.potential.m() == 1, "eigen propagation needs the m = 1 table");
    const Grid& grid = table.grid;
    check_size(grid, f);
    const double h = grid.h();
    const double f2 = std::pow(l2_norm(grid, f), 2);
    require(f2 > 0, "initial data vanishes");

    std::vector<Complex> a(table.K());
    double captured = 0;
    for (std::size_t k = 0; k < table.K(); ++k) {
        const auto& phi = table.pairs[k].phi;
        Complex s = 0;
        for (std::size_t i = 0; i < grid.N; ++i) s += phi[i] * f[i];
        a[k] = s * h;
        captured += std::norm(a[k]);
    }
    const double defect = std::max(0.0, 1 - captured / f2);
    if (defect > max_defect)
    {
        char msg[96];
        std::snprintf(msg, sizeof msg, "%zu modes miss a fraction %.3g of the data", table.K(), defect);
        throw Error(ErrorKind::insufficient_modes, msg);
    }

    PropagatorState st;
    st.t = t;
    st.grid = grid;
    st.psi.assign(grid.N, 0);
    for (std::size_t k = 0; k < table.K(); ++k) {
        const Complex c = a[k] * std::exp(-I * (table.pairs[k].lambda * t));
        const auto& phi = table.pairs[k].phi;
        for (std::size_t i = 0; i < grid.N; ++i) st.psi[i] += c * phi[i];
    }
    st.norm = l2_norm(grid, st.psi);
    st.provenance = Provenance::eigen;
    st.truncation_defect = defect;
    return st;
}

std::optional<int> resonant_index(double t, double band) {
    const double n = std::round(t / (pi / 2));
    if (std::fabs(t - n * pi / 2) < band) return static_cast<int>(n);
    return std::nullopt;
}

MehlerKernel MehlerKernel::at(double t) {
    if (resonant_index(t))
        throw Error(ErrorKind::resonant_time, "t is within the resonant band of a multiple of pi/2");
    MehlerKernel K;
    K.t = t;
    const double s = std::sin(2 * t);
    K.inv_sin = 1 / s;
    K.cot = std::cos(2 * t) / s;
    const double n = std::floor(2 * t / pi);
    K.prefactor = std::exp(-I * (pi / 4 + pi * n / 2)) / std::sqrt(2 * pi * std::fabs(s));
    return K;
}

Complex MehlerKernel::operator()(double x, double y) const {
    return prefactor * std::exp(I * (0.5 * cot * (x * x + y * y) - x * y * inv_sin));
}

PropagatorState evolve_resonant(const CVec& f, const Grid& grid, int n) {
    check_size(grid, f);
    PropagatorState st;
    st.t = n * pi / 2;
    st.grid = grid;
    st.psi.resize(grid.N);
    // e^{-i n pi/2} for integer n, exactly
    static const Complex powers[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    const Complex phase = powers[((n % 4) + 4) % 4];
    const bool flip = n % 2 != 0;
    for (std::size_t i = 0; i < grid.N; ++i) st.psi[i] = phase * f[flip ? grid.N - 1 - i : i];
    st.norm = l2_norm(grid, st.psi);
    st.provenance = Provenance::resonant;
    return st;
}

namespace {

// index range holding everything above 1e-16 of the peak, padded
std::pair<std::size_t, std::size_t> support(const CVec& f) {
    double peak = 0;
    for (const auto& v : f) peak = std::max(peak, std::abs(v));
    require(peak > 0, "initial data vanishes");
    std::size_t lo = f.size(), hi = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > 1e-16 * peak) {
            lo = std::min(lo, i);
            hi = i;
        }
    lo = lo >= 8 ? lo - 8 : 0;
    hi = std::min(f.size() - 1, hi + 8);
    return {lo, hi};
}

// refinement factor so the kernel is sampled 8 times per oscillation
std::size_t refinement(const MehlerKernel& K, const Grid& grid, double ylo, double yhi) {
    const double rate = grid.X * std::fabs(K.inv_sin) + std::max(std::fabs(ylo), std::fabs(yhi)) * std::fabs(K.cot);
    const double dy = 2 * pi / (8 * rate);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(grid.h() / dy)));
}

// psi(x_i) = dy sum_j K(x_i, y0 + j dy) f_j, summed by Horner in z = e^{-i x dy / sin 2t}
PropagatorState mehler_sum(const MehlerKernel& K, const Grid& grid, double y0, double dy, CVec g) {
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double y = y0 + j * dy;
        g[j] *= std::exp(I * (0.5 * K.cot * y * y));
    }
    PropagatorState st;
    st.t = K.t;
    st.grid = grid;
    st.psi.resize(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double x = grid.node(i);
        const Complex z = std::exp(-I * (x * dy * K.inv_sin));
        Complex s = 0;
        for (std::size_t j = g.size(); j-- > 0;) s = s * z + g[j];
        st.psi[i] = K.prefactor * dy * std::exp(I * (0.5 * K.cot * x * x - x * y0 * K.inv_sin)) * s;
    }
    st.norm = l2_norm(grid, st.psi);
    st.provenance = Provenance::mehler;
    st.quadrature_points = g.size();
    return st;
}

// 8-point Lagrange interpolation of grid data, zero beyond the walls
Complex interpolate(const CVec& f, const Grid& grid, double y) {
    const double h = grid.h();
    const double s = (y + grid.X) / h - 1;  // fractional node index
    const auto base = static_cast<long>(std::floor(s)) - 3;
    Complex v = 0;
    for (long a = base; a < base + 8; ++a) {
        double w = 1;
        for (long b = base; b < base + 8; ++b)
            if (b != a) w *= (s - b) / static_cast<double>(a - b);
        if (a >= 0 && a < static_cast<long>(grid.N)) v += w * f[a];
    }
    return v;
}

}  // namespace

PropagatorState evolve_mehler(const CVec& f, const Grid& grid, double t) {
    check_size(grid, f);
    const auto K = MehlerKernel::at(t);
    const auto [lo, hi] = support(f);
    const double ylo = grid.node(lo), yhi = grid.node(hi);
    const std::size_t r = refinement(K, grid, ylo, yhi);
    const double dy = grid.h() / r;
    CVec g((hi - lo) * r + 1);
    for (std::size_t j = 0; j < g.size(); ++j)
        g[j] = (j % r == 0) ? f[lo + j / r] : interpolate(f, grid, ylo + j * dy);
    return mehler_sum(K, grid, ylo, dy, std::move(g));
}

PropagatorState evolve_mehler(const std::function<Complex(double)>& f, const Grid& grid, double t) {
    const auto K = MehlerKernel::at(t);
    const auto coarse = sample(grid, f);
    const auto [lo, hi] = support(coarse);
    const double ylo = grid.node(lo), yhi = grid.node(hi);
    const std::size_t r = refinement(K, grid, ylo, yhi);
    const double dy = grid.h() / r;
    CVec g((hi - lo) * r + 1);
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = f(ylo + j * dy);
    return mehler_sum(K, grid, ylo, dy, std::move(g));
}

PropagatorState evolve(const CVec& f, const Grid& grid, double t) {
    if (auto n = resonant_index(t)) {
        auto st = evolve_resonant(f, grid, *n);
        st.t = t;
        return st;
    }
    return evolve_mehler(f, grid, t);
}

Complex heat_kernel(Complex z, double x, double y) {
    require(z.real() > 0, "heat kernel needs Re z > 0");
    const Complex sh = std::sinh(2.0 * z);
    const Complex coth = std::cosh(2.0 * z) / sh;
    // continuous branch of sinh(2z)^{-1/2} along s + i[0, t]
    const double phi = 2 * z.imag();
    const double raw = std::atan2(std::cosh(2 * z.real()) * std::sin(phi), std::sinh(2 * z.real()) * std::cos(phi));
    const double theta = phi + std::remainder(raw - phi, 2 * pi);
    const Complex pre = std::exp(-I * (theta / 2)) / std::sqrt(2 * pi * std::abs(sh));
    return pre * std::exp(-0.5 * coth * (x * x + y * y) + x * y / sh);
}

namespace {

double log_bound_ratio(double s, double t, double x, double y) {
    const Complex z(s, t);
    const Complex sh = std::sinh(2.0 * z);
    const Complex coth = std::cosh(2.0 * z) / sh;
    const double log_k = -0.5 * std::log(2 * pi * std::abs(sh)) + std::real(-0.5 * coth * (x * x + y * y) + x * y / sh);
    return log_k + 0.5 * std::log(s) + s * (x - y) * (x - y) / (4 * (s * s + t * t));
}

}  // namespace

KernelBoundFit fit_kernel_bound(double T, std::size_t samples, unsigned seed) {
    require(T > 0 && samples > 0, "kernel bound fit needs T > 0 and samples");
    KernelBoundFit fit;
    fit.T = T;
    fit.samples = samples;
    fit.free_limit = 1 / std::sqrt(4 * pi);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logs(std::log(1e-3), std::log(2.0)), ts(0, T), xs(-10, 10);
    auto batch = [&] {
        double best = -1e300;
        for (std::size_t i = 0; i < samples; ++i) {
            const double s = std::exp(logs(rng)), t = ts(rng), x = xs(rng), y = xs(rng);
            best = std::max(best, log_bound_ratio(s, t, x, y));
        }
        return std::exp(best);
    };
    fit.C = batch();
    fit.check_max = batch();
    fit.holds = fit.check_max <= fit.slack * fit.C;
    return fit;
}

Complex coherent_value(double k, double t, double x) {
    // u(t) = e^{-it} e^{-k^2/4} pi^{-1/4} exp(-x^2/2 + sqrt2 b x - b^2/2), b = -ik e^{-2it}/sqrt2
    const Complex b = -I * k * std::exp(-2.0 * I * t) / std::sqrt(2.0);
    const Complex e = -I * t - k * k / 4 - x * x / 2 + std::sqrt(2.0) * b * x - b * b / 2.0;
    return std::pow(pi, -0.25) * std::exp(e);
}

CVec coherent_state(double k, double t, const Grid& grid) {
    return sample(grid, [&](double x) { return coherent_value(k, t, x); });
}

namespace {

// integral over [a, b] of pi^{-1/2} e^{-(x - c)^2}
double gauss_piece(double a, double b, double c) {
    const double u = a - c, v = b - c;
    if (u >= 0) return 0.5 * (std::erfc(u) - std::erfc(v));
    if (v <= 0) return 0.5 * (std::erfc(-v) - std::erfc(-u));
    return 0.5 * (std::erf(v) - std::erf(u));
}

}  // namespace

double coherent_mass(const RealSet& set, double k, double t) {
    const double c = -k * std::sin(2 * t);
    if (set.generated() && set.horizon() < std::fabs(c) + 30)
        throw Error(ErrorKind::horizon_too_small, "set horizon does not hold the wave packet");
    double m = 0;
    for (const auto& iv : set.intervals()) m += gauss_piece(iv.lo, iv.hi, c);
    return m;
}

MinimalTimeTable minimal_time_scan(const RealSet& set, const std::vector<double>& T_list,
                                   const std::vector<double>& k_list, double dt) {
    require(!T_list.empty() && !k_list.empty(), "empty T or k list");
    require(dt > 0 && dt <= 0.01, "time step must lie in (0, 0.01]");
    MinimalTimeTable tab;
    tab.T = T_list;
    tab.k = k_list;
    tab.dt = dt;
    auto midpoint = [&](double T, double k, double step) {
        const auto n = static_cast<std::size_t>(std::ceil(T / step - 1e-12));
        const double d = T / n;
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += coherent_mass(set, k, (i + 0.5) * d);
        return s * d;
    };
    for (double T : T_list) {
        require(T > 0, "T must be positive");
        std::vector<double> row, fine;
        for (double k : k_list) {
            const double q = midpoint(T, k, dt), qf = midpoint(T, k, dt / 2);
            row.push_back(q);
            fine.push_back(qf);
            const double change = std::fabs(q - qf);
            tab.max_change = std::max(tab.max_change, change);
            if (change > std::max(1e-2 * std::fabs(qf), 1e-4)) tab.stable = false;
        }
        tab.Q.push_back(row);
        tab.Q_refined.push_back(fine);
    }
    return tab;
}

TwoTimeRecord two_time_quotient(const CVec& f, double S, double T, const RealSet& E1, const RealSet& E2,
                                const SpectrumTable& table) {
    require(S >= 0 && S < T, "two-time quotient needs 0 <= S < T");
    TwoTimeRecord r;
    r.S = S;
    r.T = T;
    r.norm2 = std::pow(l2_norm(table.grid, f), 2);
    const auto uS = evolve_eigen(f, S, table);
    const auto uT = evolve_eigen(f, T, table);
    r.mass_S = mass_on(E1, table.grid, uS.psi);
    r.mass_T = mass_on(E2, table.grid, uT.psi);
    const double den = r.mass_S + r.mass_T;
    r.quotient = den > 0 ? r.norm2 / den : std::numeric_limits<double>::infinity();
    r.resonant = resonant_index(T - S).has_value();
    r.regime = r.resonant ? "resonant" : "non-resonant";
    return r;
}

namespace {

// |K_{1+it}(x, y0)|^2 = G exp(-p (x - xc)^2)
struct Packet {
    double logG = 0;
    double p = 0;
    double xc = 0;
};

Packet packet(double t, double y0) {
    const Complex z(1, t);
    const Complex sh = std::sinh(2.0 * z);
    const double p = std::real(std::cosh(2.0 * z) / sh);
    const double q = std::real(1.0 / sh);
    Packet pk;
    pk.p = p;
    pk.xc = y0 * q / p;
    pk.logG = -std::log(2 * pi * std::abs(sh)) - p * y0 * y0 + p * pk.xc * pk.xc;
    return pk;
}

// integral over [a, b] of |v|^2
double packet_piece(const Packet& pk, double a, double b) {
    const double r = std::sqrt(pk.p);
    // G sqrt(pi/p) times the normalized Gaussian mass
    return std::exp(pk.logG) * std::sqrt(pi / pk.p) * gauss_piece(r * a, r * b, r * pk.xc);
}

}  // namespace

HeatWitness heat_witness(const RealSet& set, double y0, double T, double C_obs) {
    require(T > 0 && C_obs > 0, "heat witness needs T > 0 and C_obs > 0");
    HeatWitness w;
    w.y0 = y0;
    w.T = T;
    w.C_obs = C_obs;
    const double inf = std::numeric_limits<double>::infinity();
    w.lhs = packet_piece(packet(0, y0), -inf, inf);
    w.projection_bound = std::exp(-2.0) * std::exp(-y0 * y0) / std::sqrt(pi);
    w.lhs_ok = w.lhs >= w.projection_bound;
    w.rho = std::max(1.0, std::fabs(y0));

    auto tail = [&](double L) {
        const double a = y0 - L * w.rho, b = y0 + L * w.rho;
        return C_obs * integrate_adaptive(
                           [&](double t) {
                               const auto pk = packet(t, y0);
                               return packet_piece(pk, -inf, a) + packet_piece(pk, b, inf);
                           },
                           0, T, 1e-10);
    };
    const double target = w.lhs / 2;
    double hi = 1;
    while (tail(hi) > target) {
        hi *= 2;
        if (hi > 1e4) throw Error(ErrorKind::no_convergence, "no window suppresses the tail");
    }
    double lo = 0;
    if (tail(lo) <= target) hi = 0;
    for (int it = 0; it < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) <= target ? hi : lo) = mid;
    }
    w.L = hi;
    w.tail = tail(hi);
    w.window = {y0 - w.L * w.rho, y0 + w.L * w.rho};

    for (int i = 0; i <= 2000; ++i) w.peak = std::max(w.peak, std::exp(packet(T * i / 2000.0, y0).logG));
    w.measure_bound = w.lhs / (2 * C_obs * T * w.peak);
    w.window_measure = set.measure_in(w.window);
    const auto inside = set.clipped(w.window);
    w.window_mass = C_obs * integrate_adaptive(
                                [&](double t) {
                                    const auto pk = packet(t, y0);
                                    double s = 0;
                                    for (const auto& iv : inside.intervals()) s += packet_piece(pk, iv.lo, iv.hi);
                                    return s;
                                },
                                0, T, 1e-10);
    w.satisfied = w.window_measure >= w.measure_bound;
    return w;
}

}  // namespace obslab
