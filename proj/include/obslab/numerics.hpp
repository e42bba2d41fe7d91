#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace obslab {

inline constexpr double pi = 3.141592653589793238462643383279502884;

// Lanczos approximation (g = 7, 9 terms), x > 0.
double log_gamma(double x);
double beta_function(double a, double b);

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Cached n-point Gauss-Legendre rule.
const GaussRule& gauss_legendre(int n);

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n = 20);

// Adaptive bisection of a 20-point rule against its two halves.
// Throws quadrature_failure past max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, int max_depth = 40);

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double max_abs_residual = 0;
};

LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace obslab
