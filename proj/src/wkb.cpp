#include "obslab/wkb.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace obslab {

namespace {

double ipow(double x, int n) {
    double r = 1;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

constexpr double kTol = 1e-12;

// ∫_0^u sqrt(1 - s^{2m}) ds for 0 <= u <= 1; s = 1 - v^2 near the endpoint.
double well_integral(int m, double u) {
    if (u <= 0) return 0;
    const int p = 2 * m;
    const double split = 0.5;
    auto plain = [p](double s) { return std::sqrt(std::max(0.0, 1 - ipow(s, p))); };
    auto near = [p](double v) {
        const double s = 1 - v * v;
        return std::sqrt(std::max(0.0, 1 - ipow(s, p))) * 2 * v;
    };
    if (u <= split) return integrate_adaptive(plain, 0, u, kTol);
    return integrate_adaptive(plain, 0, split, kTol) +
           integrate_adaptive(near, std::sqrt(1 - u), std::sqrt(1 - split), kTol);
}

// ∫_1^u sqrt(s^{2m} - 1) ds for u >= 1; s = 1 + v^2 near the endpoint.
double barrier_integral(int m, double u) {
    if (u <= 1) return 0;
    const int p = 2 * m;
    const double split = 2.0;
    auto near = [p](double v) {
        const double s = 1 + v * v;
        return std::sqrt(std::max(0.0, ipow(s, p) - 1)) * 2 * v;
    };
    auto plain = [p](double s) { return std::sqrt(std::max(0.0, ipow(s, p) - 1)); };
    if (u <= split) return integrate_adaptive(near, 0, std::sqrt(u - 1), kTol);
    return integrate_adaptive(near, 0, 1, kTol) + integrate_adaptive(plain, split, u, kTol);
}

double full_well(int m) {
    static thread_local std::vector<double> cache;
    if (cache.size() <= static_cast<std::size_t>(m)) cache.resize(m + 1, -1);
    if (cache[m] < 0) cache[m] = well_integral(m, 1.0);
    return cache[m];
}

}  // namespace

PhaseIntegrals phase_integrals(double mu, int m, double x) {
    require(mu > 0 && m >= 1, "phase integrals need mu > 0 and m >= 1");
    const double scale = std::pow(mu, m + 1);
    const double u = std::fabs(x) / mu;
    const double sgn = x < 0 ? -1.0 : 1.0;
    PhaseIntegrals r;
    if (u <= 1) {
        const double inside = well_integral(m, u);
        r.s_minus = sgn * scale * inside;
        r.s_plus = -scale * (full_well(m) - inside);
    } else {
        const double outside = barrier_integral(m, u);
        r.s_minus = sgn * scale * (full_well(m) + outside);
        r.s_plus = scale * outside;
    }
    return r;
}

PhaseIntegrals phase_integrals(const SpectrumTable& table, int k, double x) {
    require(table.potential.is_monomial(), "phase integrals are defined for monomial potentials");
    require(k >= 1 && k <= static_cast<int>(table.K()), "eigenvalue index out of range");
    return phase_integrals(*table.pairs[k - 1].mu, table.potential.m(), x);
}

const char* to_string(Region r) {
    switch (r) {
        case Region::oscillatory: return "oscillatory";
        case Region::turning: return "turning";
        case Region::tail: return "tail";
    }
    return "unknown";
}

double WKBProfile::s_minus(double x) const { return phase_integrals(mu, m, x).s_minus; }
double WKBProfile::s_plus(double x) const { return phase_integrals(mu, m, x).s_plus; }

double WKBProfile::error_budget(double x) const {
    const double ax = std::fabs(x);
    const double gap = std::fabs(ipow(ax, 2 * m) - ipow(mu, 2 * m));
    const double amp = ax < mu ? std::fabs(a_minus) : std::fabs(a_plus);
    return amp * std::pow(gap, -0.25) * std::pow(gap, -0.5) / std::fabs(ax - mu);
}

namespace {

double osc_shape(const WKBProfile& p, double x, double s_minus) {
    const double base = std::pow(ipow(p.mu, 2 * p.m) - ipow(std::fabs(x), 2 * p.m), -0.25);
    return base * (p.parity == Parity::even ? std::cos(s_minus) : std::sin(s_minus));
}

double tail_shape(const WKBProfile& p, double x, double s_plus) {
    const double base = std::pow(ipow(std::fabs(x), 2 * p.m) - ipow(p.mu, 2 * p.m), -0.25);
    const double sign = (x < 0 && p.parity == Parity::odd) ? -1.0 : 1.0;
    return sign * base * std::exp(-s_plus);
}

}  // namespace

WKBValue wkb_eval(const WKBProfile& p, double x) {
    WKBValue v;
    const double ax = std::fabs(x);
    if (ax < p.inner_edge()) {
        v.region = Region::oscillatory;
        v.value = p.a_minus * osc_shape(p, x, p.s_minus(x));
        v.error_bound = p.error_budget(x);
    } else if (ax > p.outer_edge()) {
        v.region = Region::tail;
        v.value = p.a_plus * tail_shape(p, x, p.s_plus(x));
        v.error_bound = p.error_budget(x);
    } else {
        v.region = Region::turning;
        v.value = 0;
        v.error_bound = p.turning_constant * std::pow(p.mu, (p.m - 2) / 6.0);
    }
    return v;
}

WKBProfile fit_amplitudes(const SpectrumTable& table, int k) {
    require(table.potential.is_monomial(), "WKB profiles are defined for monomial potentials");
    require(k >= 1 && k <= static_cast<int>(table.K()), "eigenvalue index out of range");
    const EigenPair& pair = table.pairs[k - 1];
    const Grid& grid = table.grid;
    const double h = grid.h();

    WKBProfile p;
    p.k = k;
    p.m = table.potential.m();
    p.lambda = pair.lambda;
    p.mu = *pair.mu;
    p.parity = *pair.parity;
    p.delta = 0.05 * std::pow(2.0 * p.m, -1.0 / 3);
    p.half_width = p.delta * std::pow(p.mu, -(2.0 * p.m - 1) / 3);

    const double s_edge = p.s_minus(p.inner_edge());
    p.periods = s_edge / pi;
    if (p.periods < 5)
        throw Error(ErrorKind::precondition, "oscillatory region holds fewer than 5 periods for k=" + std::to_string(k));

    double peak = 0;
    for (double v : pair.phi) peak = std::max(peak, std::fabs(v));

    // oscillatory fit over the middle half by phase
    std::vector<std::size_t> osc;
    std::vector<double> osc_s;
    double num = 0, den = 0;
    p.osc_window = {std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double x = grid.node(i);
        if (std::fabs(x) >= p.inner_edge()) continue;
        const double s = p.s_minus(x);
        if (std::fabs(s) < 0.25 * s_edge || std::fabs(s) > 0.75 * s_edge) continue;
        const double g = osc_shape(p, x, s);
        num += g * pair.phi[i];
        den += g * g;
        osc.push_back(i);
        osc_s.push_back(s);
        p.osc_window.lo = std::min(p.osc_window.lo, std::fabs(x));
        p.osc_window.hi = std::max(p.osc_window.hi, std::fabs(x));
    }
    p.osc_points = osc.size();
    if (osc.size() < 20 || den <= 0)
        throw Error(ErrorKind::ill_conditioned_fit, "too few points in the oscillatory window");
    p.a_minus = num / den;
    for (std::size_t j = 0; j < osc.size(); ++j) {
        const double x = grid.node(osc[j]);
        const double r = std::fabs(pair.phi[osc[j]] - p.a_minus * osc_shape(p, x, osc_s[j]));
        p.osc_max_residual = std::max(p.osc_max_residual, r);
        p.osc_max_error_ratio = std::max(p.osc_max_error_ratio, r / p.error_budget(x));
    }
    p.osc_edge_budget = p.error_budget(p.osc_window.hi);

    // tail fit: beyond mu + 3 hw and past unit barrier action, down to 1e-10 of the peak
    double tail_start = p.mu + 3 * p.half_width;
    {
        double lo = p.mu, hi = 2 * p.mu + 1;
        while (p.s_plus(hi) < 1) hi *= 1.5;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (p.s_plus(mid) < 1 ? lo : hi) = mid;
        }
        tail_start = std::max(tail_start, hi);
    }
    std::vector<std::size_t> tail;
    std::vector<double> tail_s;
    num = den = 0;
    p.tail_window = {std::numeric_limits<double>::infinity(), 0};
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double x = grid.node(i);
        if (std::fabs(x) < tail_start || std::fabs(pair.phi[i]) < 1e-10 * peak) continue;
        const double s = p.s_plus(x);
        const double g = tail_shape(p, x, s);
        num += g * pair.phi[i];
        den += g * g;
        tail.push_back(i);
        tail_s.push_back(s);
        p.tail_window.lo = std::min(p.tail_window.lo, std::fabs(x));
        p.tail_window.hi = std::max(p.tail_window.hi, std::fabs(x));
    }
    p.tail_points = tail.size();
    if (tail.size() < 20 || den <= 0)
        throw Error(ErrorKind::ill_conditioned_fit, "too few points in the tail window");
    p.a_plus = num / den;
    double qmin = std::numeric_limits<double>::infinity(), qmax = -qmin;
    for (std::size_t j = 0; j < tail.size(); ++j) {
        const double x = grid.node(tail[j]);
        const double r = std::fabs(pair.phi[tail[j]] - p.a_plus * tail_shape(p, x, tail_s[j]));
        p.tail_max_residual = std::max(p.tail_max_residual, r);
        if (x > 0) {
            const double q = std::log(std::fabs(pair.phi[tail[j]])) + tail_s[j] +
                             0.25 * std::log(ipow(x, 2 * p.m) - ipow(p.mu, 2 * p.m));
            qmin = std::min(qmin, q);
            qmax = std::max(qmax, q);
        }
    }
    p.tail_logslope_spread = qmax - qmin;

    // turning-region envelope
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double ax = std::fabs(grid.node(i));
        if (ax >= p.inner_edge() && ax <= p.outer_edge())
            p.turning_envelope = std::max(p.turning_envelope, std::fabs(pair.phi[i]));
    }
    p.turning_constant = p.turning_envelope / std::pow(p.mu, (p.m - 2) / 6.0);

    // nodal phases: cos S = 0 at S = (j + 1/2) pi, sin S = 0 at S = j pi
    const double shift = p.parity == Parity::even ? 0.5 : 0.0;
    for (std::size_t i = 0; i + 1 < grid.N; ++i) {
        const double a = pair.phi[i], b = pair.phi[i + 1];
        if (!(a * b < 0)) continue;
        const double z = grid.node(i) + h * a / (a - b);
        if (std::fabs(z) >= p.inner_edge()) continue;
        const double s = p.s_minus(z);
        const double target = (std::round(s / pi - shift) + shift) * pi;
        const double slope = std::sqrt(ipow(p.mu, 2 * p.m) - ipow(std::fabs(z), 2 * p.m));
        const double cells = std::fabs(s - target) / slope / h;
        p.zero_offset_cells_full = std::max(p.zero_offset_cells_full, cells);
        if (std::fabs(z) >= p.osc_window.lo && std::fabs(z) <= p.osc_window.hi)
            p.zero_offset_cells = std::max(p.zero_offset_cells, cells);
    }
    return p;
}

double LiouvilleFrame::phase(double x) const {
    if (x == 0) return 0;
    const double v = integrate_adaptive(
        [this](double t) { return std::sqrt(std::max(0.0, lambda - potential(t))); }, 0, std::fabs(x), 1e-12);
    return x < 0 ? -v : v;
}

namespace {

double potential_slope(const Potential& V, double x) {
    if (V.is_monomial()) return 2.0 * V.m() * ipow(x, 2 * V.m() - 1);
    return 2.0 * V.c() * V.C() * x * std::pow(1 + x * x, V.c() - 1);
}

}  // namespace

LiouvilleFrame liouville_frame(const SpectrumTable& table, int k) {
    require(k >= 1 && k <= static_cast<int>(table.K()), "eigenvalue index out of range");
    const EigenPair& pair = table.pairs[k - 1];
    const Grid& grid = table.grid;
    const std::size_t c = grid.center();
    require(grid.N % 2 == 1 && c >= 2 && c + 2 < grid.N, "origin must be an interior node");
    const double h = grid.h();
    const auto& f = pair.phi;

    LiouvilleFrame fr;
    fr.k = k;
    fr.lambda = pair.lambda;
    fr.potential = table.potential;
    const double phi0 = f[c];
    const double dphi0 = (-f[c + 2] + 8 * f[c + 1] - 8 * f[c - 1] + f[c - 2]) / (12 * h);
    const double q = pair.lambda - table.potential(0);
    require(q > 0, "eigenvalue must exceed V(0)");
    // w = q^{1/4} phi as a function of y with dy/dx = sqrt(q)
    fr.w0 = std::pow(q, 0.25) * phi0;
    fr.w0prime = std::pow(q, -0.25) * dphi0 - 0.25 * std::pow(q, -1.25) * potential_slope(table.potential, 0) * phi0;
    if (pair.parity) {
        if (*pair.parity == Parity::even)
            fr.w0prime = 0;
        else
            fr.w0 = 0;
    }
    fr.C = {fr.w0, -fr.w0prime};
    const double xh = table.potential.turning_point(pair.lambda / 2);
    fr.omega = {-xh, xh};
    fr.theta0 = std::atan2(fr.w0prime, fr.w0);
    return fr;
}

double amplitude_constant(const SpectrumTable& table, int k) { return std::abs(liouville_frame(table, k).C); }

AmplitudeSweep amplitude_sweep(const SpectrumTable& table, int k_first, int k_last) {
    require(table.potential.is_monomial(), "amplitude sweep needs a monomial potential");
    require(k_first >= 1 && k_last <= static_cast<int>(table.K()) && k_last - k_first >= 2,
            "sweep needs three or more indices inside the table");
    const int m = table.potential.m();
    AmplitudeSweep s;
    s.target_a = (m - 1) / 2.0;
    s.target_c = 0.25 - 0.25 / m;
    std::vector<double> lmu, llam, la, lb, lc;
    for (int k = k_first; k <= k_last; ++k) {
        WKBProfile p = fit_amplitudes(table, k);
        const double C = amplitude_constant(table, k);
        s.ks.push_back(k);
        s.mu.push_back(p.mu);
        s.lambda.push_back(p.lambda);
        s.a_minus.push_back(p.a_minus);
        s.a_plus.push_back(p.a_plus);
        s.c_abs.push_back(C);
        s.turning_constant.push_back(p.turning_constant);
        s.max_error_ratio = std::max(s.max_error_ratio, p.osc_max_error_ratio);
        lmu.push_back(std::log(p.mu));
        llam.push_back(std::log(p.lambda));
        la.push_back(std::log(std::fabs(p.a_minus)));
        lb.push_back(std::log(std::fabs(p.a_plus)));
        lc.push_back(std::log(C));
        s.profiles.push_back(std::move(p));
    }
    s.slope_a_minus = fit_line(lmu, la).slope;
    s.slope_a_plus = fit_line(lmu, lb).slope;
    s.slope_c = fit_line(llam, lc).slope;
    return s;
}

}  // namespace obslab
