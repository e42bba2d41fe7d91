#include <doctest.h>

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"
#include "obslab/tridiag.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>

using namespace obslab;

TEST_CASE("log_gamma matches the standard library") {
    for (double x : {0.1, 0.25, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 55.5}) {
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    }
}

TEST_CASE("beta values") {
    CHECK(beta_function(1.5, 0.5) == doctest::Approx(pi / 2).epsilon(1e-14));
    // mpmath oracle
    CHECK(beta_function(1.5, 0.25) == doctest::Approx(3.49607673905615974).epsilon(1e-13));
    CHECK(beta_function(1.5, 1.0 / 6) == doctest::Approx(5.46446395774705896).epsilon(1e-13));
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
    const auto& r = gauss_legendre(20);
    double s = 0;
    for (double w : r.weights) s += w;
    CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(gauss_integrate([](double x) { return std::pow(x, 38); }, -1, 1) ==
          doctest::Approx(2.0 / 39).epsilon(1e-13));
}

TEST_CASE("adaptive quadrature resolves a square-root endpoint") {
    const double v = integrate_adaptive([](double t) { return std::sqrt(1 - t * t); }, 0, 1, 1e-12);
    CHECK(v == doctest::Approx(pi / 4).epsilon(1e-9));
}

TEST_CASE("adaptive quadrature reports failure at the depth cap") {
    CHECK_THROWS_AS(integrate_adaptive([](double t) { return 1 / std::sqrt(t); }, 0, 1, 1e-15, 3), Error);
}

TEST_CASE("line fit recovers slope and intercept") {
    std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
}

TEST_CASE("tridiagonal bisection and inverse iteration agree with a dense solver") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1, 1);
    const int n = 40;
    std::vector<double> d(n), e(n - 1);
    for (auto& v : d) v = 3 * u(rng);
    for (auto& v : e) v = u(rng);
    SymTridiagonal A(d, e);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) M(i, i) = d[i];
    for (int i = 0; i + 1 < n; ++i) M(i, i + 1) = M(i + 1, i) = e[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    const auto [lo, hi] = A.bounds();
    for (int k = 0; k < n; ++k) {
        const double lam = A.bisect(k, lo, hi, 1e-15);
        CHECK(lam == doctest::Approx(es.eigenvalues()(k)).epsilon(1e-12));
        std::vector<double> start(n);
        for (auto& v : start) v = u(rng);
        const auto x = A.inverse_iteration(lam, start, 2);
        CHECK(A.residual(x, A.rayleigh_quotient(x)) < 1e-10);
    }
    CHECK(A.count_below(hi + 1) == static_cast<std::size_t>(n));
    CHECK(A.count_below(lo - 1) == 0u);
}
