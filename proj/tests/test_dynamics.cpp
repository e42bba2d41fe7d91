#include "doctest.h"

#include "obslab/dynamics.hpp"
#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <cmath>

using namespace obslab;

namespace {

// 1200 exact modes on [-40, 40] capture the test states below to ~1e-14
const SpectrumTable& modes() {
    static const auto t = hermite_table(1200, uniform_grid(40, 0.01));
    return t;
}

double bump(double x, double c, double r) {
    const double s = (x - c) / r;
    return std::fabs(s) < 1 ? std::exp(-1 / (1 - s * s)) : 0.0;
}

struct TestState {
    const char* name;
    std::function<Complex(double)> f;
};

std::vector<TestState> states() {
    return {
        {"shifted gaussian", [](double x) { return Complex(std::exp(-(x - 2) * (x - 2) / 2), 0); }},
        {"bump", [](double x) { return Complex(bump(x, 1, 5), 0); }},
        {"even bump", [](double x) { return Complex(bump(x, 0, 5), 0); }},
        {"coherent", [](double x) { return coherent_value(2, 0, x); }},
    };
}

}  // namespace

TEST_CASE("uniform grid keeps the origin") {
    auto g = uniform_grid(40, 0.01);
    CHECK(g.N % 2 == 1);
    CHECK(g.h() <= 0.01);
    CHECK(g.node(g.center()) == doctest::Approx(0).epsilon(1e-14));
}

TEST_CASE("single mode evolves by its phase") {
    const auto& t = modes();
    CVec f(t.grid.N);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = t.pairs[0].phi[i];
    for (double s : {0.3, 1.0, 2.5}) {
        auto a = evolve_eigen(f, s, t);
        CVec ex(f.size());
        for (std::size_t i = 0; i < f.size(); ++i) ex[i] = std::exp(Complex(0, -s)) * f[i];
        CHECK(l2_distance(t.grid, a.psi, ex) <= 1e-12);
        auto b = evolve_mehler(f, t.grid, s);
        CHECK(l2_distance(t.grid, b.psi, ex) <= 1e-6);
    }
}

TEST_CASE("eigen and Mehler propagators agree") {
    const auto& t = modes();
    for (const auto& st : states()) {
        const auto f = sample(t.grid, st.f);
        const double nf = l2_norm(t.grid, f);
        for (double s : {0.2, 0.3, pi / 4, 1.0, 2.0}) {
            auto a = evolve_eigen(f, s, t);
            auto b = evolve_mehler(f, t.grid, s);
            INFO(st.name << " t=" << s);
            CHECK(l2_distance(t.grid, a.psi, b.psi) <= 1e-6 * nf);
            CHECK(std::fabs(a.norm - nf) <= 1e-8 * nf);
            CHECK(std::fabs(b.norm - nf) <= 1e-8 * nf);
        }
    }
}

TEST_CASE("callable data gives the same Mehler result") {
    const auto& t = modes();
    auto st = states()[1];
    auto a = evolve_mehler(sample(t.grid, st.f), t.grid, 0.3);
    auto b = evolve_mehler(st.f, t.grid, 0.3);
    CHECK(l2_distance(t.grid, a.psi, b.psi) <= 1e-10);
}

TEST_CASE("Mehler on a coarse grid refines by interpolation") {
    auto g = uniform_grid(25, 0.05);
    auto f = sample(g, [](double x) { return Complex(std::exp(-(x - 1) * (x - 1) / 2), 0); });
    auto m = evolve_mehler(f, g, 0.2);
    CHECK(m.quadrature_points > 2 * f.size() / 5);
    // against the same data sampled directly on a fine grid
    auto fine = uniform_grid(25, 0.01);
    auto mf = evolve_mehler([](double x) { return Complex(std::exp(-(x - 1) * (x - 1) / 2), 0); }, fine, 0.2);
    for (std::size_t i = 0; i < g.N; i += 50) {
        const double x = g.node(i);
        const auto j = static_cast<std::size_t>(std::llround((x + fine.X) / fine.h() - 1));
        CHECK(std::abs(m.psi[i] - mf.psi[j]) <= 1e-9);
    }
}

TEST_CASE("kernel modulus is flat") {
    auto K = MehlerKernel::at(0.4);
    const double expect = 1 / std::sqrt(2 * pi * std::fabs(std::sin(0.8)));
    for (double x : {-7.0, 0.0, 3.3})
        for (double y : {-2.0, 0.5, 9.0}) CHECK(std::abs(K(x, y)) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("quarter period is the Fourier transform") {
    // t = pi/4: psi(x) = e^{-i pi/4} (2 pi)^{-1/2} int e^{-ixy} f(y) dy
    auto g = uniform_grid(20, 0.01);
    const double a = 0.7;
    auto f = sample(g, [&](double y) { return Complex(std::exp(-a * y * y), 0); });
    auto m = evolve_mehler(f, g, pi / 4);
    for (std::size_t i = 0; i < g.N; i += 97) {
        const double x = g.node(i);
        const Complex ft = std::exp(Complex(0, -pi / 4)) * std::exp(-x * x / (4 * a)) / std::sqrt(2 * a);
        CHECK(std::abs(m.psi[i] - ft) <= 1e-10);
    }
}

TEST_CASE("resonant times use the reflection identity") {
    const auto& t = modes();
    const auto f = sample(t.grid, states()[0].f);
    CHECK_THROWS_AS(evolve_mehler(f, t.grid, pi / 2 + 5e-4), Error);
    try {
        evolve_mehler(f, t.grid, pi / 2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::resonant_time);
    }
    auto r = evolve(f, t.grid, pi / 2);
    CHECK(r.provenance == Provenance::resonant);
    const std::size_t N = t.grid.N;
    for (std::size_t i = 0; i < N; i += 101) CHECK(r.psi[i] == Complex(0, -1) * f[N - 1 - i]);
    auto e = evolve_eigen(f, pi / 2, t);
    CHECK(l2_distance(t.grid, e.psi, r.psi) <= 1e-7);
    auto full = evolve(f, t.grid, pi);
    for (std::size_t i = 0; i < N; i += 101) CHECK(full.psi[i] == -f[i]);
    CHECK_FALSE(resonant_index(1.0).has_value());
    CHECK(*resonant_index(3 * pi / 2 - 1e-4) == 3);
}

TEST_CASE("group law, period, and the even-data half period") {
    const auto& t = modes();
    for (const auto& st : states()) {
        const auto f = sample(t.grid, st.f);
        INFO(st.name);
        auto two = evolve_eigen(evolve_eigen(f, 0.2, t).psi, 0.3, t);
        auto one = evolve_eigen(f, 0.5, t);
        CHECK(l2_distance(t.grid, two.psi, one.psi) <= 1e-7);
        auto mm = evolve_mehler(evolve_mehler(f, t.grid, 0.2).psi, t.grid, 0.3);
        CHECK(l2_distance(t.grid, mm.psi, one.psi) <= 1e-6);
        for (double s : {0.3, 1.1}) {
            auto a = evolve_eigen(f, s, t), b = evolve_eigen(f, s + pi, t);
            CHECK(modulus_distance(t.grid, a.psi, b.psi) <= 1e-7);
        }
    }
    const auto even = sample(t.grid, states()[2].f);
    auto half = evolve_eigen(even, pi / 2, t);
    CHECK(modulus_distance(t.grid, half.psi, even) <= 1e-6);
}

TEST_CASE("insufficient modes are reported") {
    auto t = hermite_table(20, uniform_grid(40, 0.01));
    const auto f = sample(t.grid, states()[1].f);
    try {
        evolve_eigen(f, 0.3, t);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::insufficient_modes);
    }
}

TEST_CASE("coherent states: closed form, unit norm, packet centre") {
    const auto& t = modes();
    for (double k : {0.0, 2.0, 5.0}) {
        const auto u0 = coherent_state(k, 0, t.grid);
        CHECK(l2_norm(t.grid, u0) == doctest::Approx(1).epsilon(1e-8));
        for (double s : {0.25, 0.9, 2.2}) {
            auto e = evolve_eigen(u0, s, t);
            CHECK(l2_distance(t.grid, e.psi, coherent_state(k, s, t.grid)) <= 1e-9);
        }
    }
    const double c = -5 * std::sin(2 * 0.4);
    CHECK(std::abs(coherent_value(5, 0.4, c)) == doctest::Approx(std::pow(pi, -0.25)).epsilon(1e-12));
    auto R = RealSet::generate(SetFamily::half_line(-300), 400);
    auto full = RealSet::from_intervals({{-1e3, 1e3}});
    CHECK(coherent_mass(full, 7, 0.3) == doctest::Approx(1).epsilon(1e-14));
    CHECK(coherent_mass(R, 7, 0.3) == doctest::Approx(1).epsilon(1e-14));
    auto right = RealSet::generate(SetFamily::half_line(1), 200);
    CHECK(coherent_mass(right, 0, 0.7) == doctest::Approx(0.5 * std::erfc(1.0)).epsilon(1e-14));
}

TEST_CASE("minimal time: collapse up to pi/2, floor beyond") {
    auto E = RealSet::generate(SetFamily::half_line(1), 200);
    const std::vector<double> ks{5, 10, 20, 40};
    auto tab = minimal_time_scan(E, {1.0, pi / 2, pi / 2 + 0.3}, ks);
    CHECK(tab.stable);
    for (std::size_t j = 1; j < ks.size(); ++j) {
        CHECK(tab.Q[0][j] < tab.Q[0][j - 1]);
        CHECK(tab.Q[1][j] < tab.Q[1][j - 1]);
    }
    CHECK(tab.Q[1].back() < 0.02);
    for (double q : tab.Q[2]) CHECK(q >= 0.05);
    // frozen oracle values: int_0^T erfc(1 + k sin 2t)/2 dt
    CHECK(tab.Q_refined[1][0] == doctest::Approx(0.00502).epsilon(5e-3));
    CHECK(tab.Q_refined[2][0] == doctest::Approx(0.20085).epsilon(5e-3));
    // the whole line gives T
    auto all = minimal_time_scan(RealSet::from_intervals({{-1e3, 1e3}}), {0.7, 1.9}, {3, 30});
    for (std::size_t i = 0; i < 2; ++i)
        for (double q : all.Q[i]) CHECK(q == doctest::Approx(all.T[i]).epsilon(1e-12));
    // the later window mirrors mass on (-inf, -1] over (0, 0.3]
    auto left = E.reflected();
    for (double k : ks) {
        const double late = integrate_adaptive([&](double s) { return coherent_mass(E, k, s); }, pi / 2, pi / 2 + 0.3);
        const double early = integrate_adaptive([&](double s) { return coherent_mass(left, k, s); }, 0, 0.3);
        CHECK(late == doctest::Approx(early).epsilon(1e-8));
    }
}

TEST_CASE("two-time quotient") {
    const auto& t = modes();
    const auto g = sample(t.grid, states()[0].f);
    auto R = RealSet::from_intervals({{-100, 100}});
    auto q = two_time_quotient(g, 0.1, 0.9, R, R, t);
    CHECK(q.quotient == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_FALSE(q.resonant);

    const double r = 5;
    auto outside = RealSet::from_intervals({{-100, -r}, {r, 100}});
    const auto even = sample(t.grid, states()[2].f);
    auto blow = two_time_quotient(even, 0, pi / 2, outside, outside, t);
    CHECK(blow.resonant);
    CHECK(blow.regime == "resonant");
    CHECK(blow.mass_S <= 1e-14);
    CHECK(blow.mass_T <= 1e-12);
    CHECK(blow.quotient > 1e10);

    auto ball = RealSet::from_intervals({{-100, -1}, {1, 100}});
    auto quarter = two_time_quotient(g, 0, pi / 4, ball, ball, t);
    CHECK(std::isfinite(quarter.quotient));
    CHECK(quarter.quotient > 0.5);
    CHECK(quarter.quotient < 10);
    CHECK_THROWS_AS(two_time_quotient(g, 1, 1, R, R, t), Error);
}

TEST_CASE("complex heat kernel: Mehler closed form matches the mode sum") {
    const double x = 0.7, y = -0.4;
    const auto hx = hermite_all(200, x), hy = hermite_all(200, y);
    for (Complex z : {Complex(1, 0), Complex(1, 0.3), Complex(0.2, 2.0), Complex(0.5, -1.2)}) {
        Complex s = 0;
        for (int k = 0; k < 200; ++k) s += std::exp(-(2.0 * k + 1) * z) * hx[k] * hy[k];
        CHECK(std::abs(heat_kernel(z, x, y) - s) <= 1e-12);
    }
    CHECK_THROWS_AS(heat_kernel(Complex(0, 1), 0, 0), Error);
}

TEST_CASE("complex heat kernel obeys the Gaussian bound with one constant") {
    for (double T : {1.0, 3.0}) {
        auto fit = fit_kernel_bound(T, 10000);
        CHECK(fit.holds);
        CHECK(fit.C > 0.2);
        CHECK(fit.C <= fit.free_limit);
    }
}

TEST_CASE("heat witness") {
    auto D = RealSet::generate(SetFamily::dyadic_gap({1, 1}), 1000);
    for (double y0 : {0.0, 1.0, 3.0, 5.0}) {
        auto w = heat_witness(D, y0, 1.0, 10.0);
        CHECK(w.lhs_ok);
        CHECK(w.lhs >= w.projection_bound);
        // ||K_1(., y0)||^2 = sum_k e^{-2 lambda_k} phi_k(y0)^2
        const auto h = hermite_all(60, y0);
        double series = 0;
        for (int k = 0; k < 60; ++k) series += std::exp(-2.0 * (2 * k + 1)) * h[k] * h[k];
        CHECK(w.lhs == doctest::Approx(series).epsilon(1e-10));
        CHECK(w.tail <= w.lhs / 2 * (1 + 1e-9));
        CHECK(w.rho == std::max(1.0, std::fabs(y0)));
    }
    auto w0 = heat_witness(D, 0, 1.0, 10.0);
    CHECK(w0.window.lo == doctest::Approx(-w0.L));
    CHECK(w0.window.hi == doctest::Approx(w0.L));
    auto w10 = heat_witness(D, 10, 1.0, 10.0);
    CHECK(w10.satisfied);
    CHECK(w10.window_measure >= w10.measure_bound);
    auto full = RealSet::from_intervals({{-1e3, 1e3}});
    auto wf = heat_witness(full, 2, 1.0, 10.0);
    CHECK(wf.satisfied);
    CHECK(wf.window_mass + wf.tail >= wf.lhs / 2);
}
