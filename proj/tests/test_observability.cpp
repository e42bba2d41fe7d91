#include "doctest.h"
#include "fixtures.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"
#include "obslab/observability.hpp"

#include <cmath>
#include <random>

using namespace obslab;

namespace {

RealSet whole_line() { return RealSet::from_intervals({{-1e7, 1e7}}); }

RealSet random_union(std::mt19937_64& rng, double span) {
    std::uniform_real_distribution<double> pos(-span, span), len(0.05, 3.0);
    std::uniform_int_distribution<int> count(1, 8);
    std::vector<Interval> pieces;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) {
        double a = pos(rng);
        pieces.push_back({a, a + len(rng)});
    }
    return RealSet::from_intervals(pieces);
}

}  // namespace

TEST_CASE("set weights integrate the indicator") {
    const auto& t = fixture::table(1);
    auto w = set_weights(whole_line(), t.grid);
    double s = 0;
    for (double v : w) s += v;
    // every node gets half of each neighbouring cell, wall cells included
    CHECK(s == doctest::Approx(t.grid.N * t.grid.h()).epsilon(1e-10));
    auto half = set_weights(RealSet::from_intervals({{0.3 * t.grid.h(), 5.0}}), t.grid);
    s = 0;
    for (double v : half) s += v;
    CHECK(s == doctest::Approx(5.0 - 0.3 * t.grid.h()).epsilon(1e-10));
    auto small = RealSet::generate(SetFamily::half_line(0), t.grid.X / 2);
    CHECK_THROWS_AS(set_weights(small, t.grid), Error);
}

TEST_CASE("half-line carries exactly half of every mode") {
    for (int m : {1, 2}) {
        auto r = eigenmass(RealSet::generate(SetFamily::half_line(0), 100), fixture::table(m));
        for (double e : r.masses) CHECK(e == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(r.verdict == MassVerdict::observable_evidence);
        CHECK(r.gap_regime == (m == 1 ? "uniform" : "growing"));
        CHECK(r.time_regime == (m == 1 ? "at some time" : "at any time"));
    }
}

TEST_CASE("masses lie in [0,1] and the whole line carries all of it") {
    const auto& t = fixture::table(2);
    auto r = eigenmass(whole_line(), t);
    for (double e : r.masses) CHECK(e == doctest::Approx(1).epsilon(1e-9));
    auto p = eigenmass(RealSet::generate(SetFamily::periodic(1), 100), t);
    for (double e : p.masses) {
        CHECK(e >= 0);
        CHECK(e <= 1);
    }
}

TEST_CASE("bounded set loses mass as modes climb") {
    for (int m : {1, 2}) {
        auto r = eigenmass(RealSet::generate(SetFamily::bounded(2), 100), fixture::table(m));
        CHECK(min_mass_upto(r, 40) < min_mass_upto(r, 20));
        CHECK(r.masses[39] < r.masses[9]);
        CHECK(r.decay_exponent > 0.5);
        CHECK(r.verdict == MassVerdict::non_observable_evidence);
    }
    // frozen values of the mass table (m=1)
    auto r = eigenmass(RealSet::generate(SetFamily::bounded(2), 100), fixture::table(1));
    CHECK(min_mass_upto(r, 20) == doctest::Approx(0.2042).epsilon(1e-3));
    CHECK(min_mass_upto(r, 40) == doctest::Approx(0.1453).epsilon(1e-3));
}

TEST_CASE("weakly thick families keep their mass on the top octave") {
    for (int m : {1, 2})
        for (auto f : {SetFamily::half_line(0), SetFamily::periodic(1), SetFamily::dyadic_gap({1, 1})}) {
            auto r = eigenmass(RealSet::generate(f, 100), fixture::table(m));
            CHECK(r.decay_exponent < 0.25);
            CHECK(r.verdict == MassVerdict::observable_evidence);
        }
}

TEST_CASE("eigenmass is additive over disjoint pieces") {
    const auto& t = fixture::table(1);
    auto a = RealSet::from_intervals({{-3, 1}, {6, 20}});
    auto b = RealSet::from_intervals({{1.5, 4.25}, {-9, -5}});
    auto ra = eigenmass(a, t), rb = eigenmass(b, t), rab = eigenmass(a.united(b), t);
    for (std::size_t k = 0; k < ra.masses.size(); ++k)
        CHECK(std::fabs(rab.masses[k] - ra.masses[k] - rb.masses[k]) <= 1e-9);
    // touching pieces share a partial cell
    auto c = RealSet::from_intervals({{1, 1.5}});
    auto rc = eigenmass(c, t), rac = eigenmass(a.united(c), t);
    for (std::size_t k = 0; k < ra.masses.size(); ++k)
        CHECK(std::fabs(rac.masses[k] - ra.masses[k] - rc.masses[k]) <= 1e-9);
}

TEST_CASE("parity fold never gains mass") {
    std::mt19937_64 rng(2024);
    for (int m : {1, 2}) {
        const auto& t = fixture::table(m);
        for (int trial = 0; trial < 15; ++trial) {
            auto E = random_union(rng, 10);
            auto r = eigenmass(E, t);
            REQUIRE(r.folded_masses.size() == r.masses.size());
            for (std::size_t k = 0; k < r.masses.size(); ++k) CHECK(r.masses[k] >= r.folded_masses[k] - 1e-9);
        }
    }
}

TEST_CASE("mass decomposition partitions the line") {
    const auto& t = fixture::table(1);
    for (int k : {5, 20, 40}) {
        auto s = mass_profile_decomposition(whole_line(), t, k);
        CHECK(s.I1 + s.I2 + s.I3 == doctest::Approx(1).epsilon(1e-9));
        CHECK(s.total == doctest::Approx(s.I1 + s.I2 + s.I3).epsilon(1e-10));
        CHECK(s.I1 > s.I3);
    }
    // R < mu/2 stays inside the oscillatory region
    auto inner = mass_profile_decomposition(RealSet::generate(SetFamily::bounded(2), 100), t, 40);
    CHECK(inner.I2 == 0);
    CHECK(inner.I3 == 0);
    CHECK(inner.I1 == doctest::Approx(eigenmass(RealSet::generate(SetFamily::bounded(2), 100), t).masses[39]));
    for (int k : {15, 25, 40}) {
        const double mu = std::sqrt(2.0 * k - 1);
        auto tail = mass_profile_decomposition(RealSet::from_intervals({{2 * mu, 1e6}}), t, k);
        CHECK(tail.total <= 1e-10);
    }
}

TEST_CASE("resolvent margin: whole line and scale covariance") {
    ProbeGrid g;
    g.X = 10;
    g.h = 0.1;
    std::vector<double> lam{0, 3, 17.5, 25};
    auto full = resolvent_margin(RealSet::from_intervals({{-20, 20}}), g, 0.01, 1, lam);
    for (double v : full.margins) CHECK(v >= 1 - 1e-9);
    auto E = RealSet::from_intervals({{-6, -2}, {1, 1.7}, {4, 9}});
    auto a = resolvent_margin(E, g, 0.01, 3, lam);
    auto b = resolvent_margin(E, g, 0.05, 15, lam);
    for (std::size_t i = 0; i < lam.size(); ++i) {
        CHECK(a.margins[i] >= 0);
        CHECK(b.margins[i] == doctest::Approx(5 * a.margins[i]).epsilon(1e-7));
    }
    CHECK_THROWS_AS(resolvent_margin(E, g, 0, 1, lam), Error);
}

TEST_CASE("resolvent margin: periodic pattern holds, bounded set fades") {
    ProbeGrid g;
    std::vector<double> lam;
    for (int i = 0; i <= 100; i += 10) lam.push_back(i);
    auto P = RealSet::generate(SetFamily::periodic(1), 60);
    auto sp = resolvent_sweep(P, g, {0.1}, {30}, lam);
    CHECK(sp.probes[sp.best].min_margin() >= 1);
    auto B = RealSet::generate(SetFamily::bounded(2), 60);
    auto sb = resolvent_sweep(B, g, {0.01, 0.1}, {10, 30}, {25, 100});
    // margins need not fall monotonically in lambda
    for (const auto& p : sb.probes) CHECK(p.margins[1] < 0.1);
}

TEST_CASE("Gaussian witness") {
    auto E = RealSet::generate(SetFamily::half_line(0), 100);
    auto w = gaussian_thickness_witness(E, 2, 5, -1e6);
    CHECK(w.lhs == doctest::Approx(1 / (2 * std::sqrt(2 * pi))).epsilon(1e-8));
    CHECK(w.lhs == doctest::Approx(0.19947).epsilon(1e-4));
    CHECK(w.window_measure == 0);
    CHECK(w.violated);
    CHECK(w.lower_bound == doctest::Approx(std::sqrt(2 * pi) / 40));
    CHECK(w.tail <= 1 / (4 * std::sqrt(2 * pi)) * (1 + 1e-9));

    auto R = whole_line();
    for (double x0 : {-50.0, 0.0, 3.5, 1e5}) {
        auto v = gaussian_thickness_witness(R, 0.5, 20, x0);
        CHECK_FALSE(v.violated);
        CHECK(v.window_measure == doctest::Approx(v.L));
        CHECK(v.rhs >= v.lhs);
    }
    CHECK_FALSE(first_violation(R, 1, 3, {-1e4, 0, 1e4}).has_value());
    auto first = first_violation(E, 1, 3, {10, 50, -1e6, -2e6});
    REQUIRE(first.has_value());
    CHECK(first->x0 == -1e6);
}

TEST_CASE("Nazarov constant: trivial, monotone, symmetric") {
    CHECK(nazarov_constant(0, 0, 256).best_constant == doctest::Approx(1).epsilon(1e-10));
    double prev = 0;
    for (double s : {0.5, 1.0, 2.0, 3.0, 4.0}) {
        double c = nazarov_constant(s, 2, 256).best_constant;
        CHECK(c >= 1);
        CHECK(c >= prev - 1e-10);
        prev = c;
    }
    CHECK(nazarov_constant(2, 5, 256).best_constant ==
          doctest::Approx(nazarov_constant(5, 2, 256).best_constant).epsilon(1e-8));
    auto sw = nazarov_sweep({1, 2, 4, 7, 10, 14, 20}, 256);
    CHECK(sw.nondecreasing);
    CHECK(sw.slope > 0);
    CHECK(sw.max_rate < 1);
}
