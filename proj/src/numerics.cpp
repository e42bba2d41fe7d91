#include "obslab/numerics.hpp"

#include "obslab/error.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace obslab {

double log_gamma(double x) {
    require(x > 0, "log_gamma needs x > 0");
    static const double coef[9] = {0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
                                   771.32342877765313,   -176.61502916214059,   12.507343278686905,
                                   -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection keeps the series in its accurate range
        return std::log(pi / std::fabs(std::sin(pi * x))) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double a = coef[0];
    const double t = z + 7.5;
    for (int i = 1; i < 9; ++i) a += coef[i] / (z + i);
    return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double beta_function(double a, double b) {
    return std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
}

namespace {

GaussRule build_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1;
            dp = n * (x * p1 - p0) / (x * x - 1);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-16) break;
        }
        {
            double p0 = 1, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
        }
        double w = 2 / ((1 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.nodes[n - 1 - i] = x;
        r.weights[i] = w;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& r = gauss_legendre(n);
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * f(c + half * r.nodes[i]);
    return s * half;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b, double whole, double tol,
             int depth, int max_depth) {
    const double m = 0.5 * (a + b);
    const double left = gauss_integrate(f, a, m);
    const double right = gauss_integrate(f, m, b);
    const double both = left + right;
    if (std::fabs(both - whole) <= tol) return both;
    if (depth >= max_depth)
        throw Error(ErrorKind::quadrature_failure, "adaptive refinement hit the depth cap");
    // tol / sqrt(2) per child keeps square-root endpoints within a modest depth
    const double child = tol * 0.7071067811865476;
    return adapt(f, a, m, left, child, depth + 1, max_depth) +
           adapt(f, m, b, right, child, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                          int max_depth) {
    if (a == b) return 0;
    const double whole = gauss_integrate(f, a, b);
    const double scale = std::max(std::fabs(whole), 1e-300);
    return adapt(f, a, b, whole, rel_tol * scale, 0, max_depth);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_line needs two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, "fit_line needs distinct abscissae");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i)
        fit.max_abs_residual =
            std::max(fit.max_abs_residual, std::fabs(y[i] - fit.intercept - fit.slope * x[i]));
    return fit;
}

}  // namespace obslab
