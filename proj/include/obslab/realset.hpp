#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace obslab {

struct Interval {
    double lo = 0;
    double hi = 0;
    double length() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

enum class Family { explicit_list, half_line, bounded, periodic, dyadic_gap, polynomial_gap };

const char* to_string(Family f);

// Gap size a_j = coeff * j^power removed from the top of [2^j, 2^{j+1}].
struct GapRule {
    double coeff = 1;
    double power = 1;
    double at(int j) const;
    bool bounded() const { return power <= 0; }
};

struct SetFamily {
    Family kind = Family::explicit_list;
    double param = 0;  // a, R, x0 or eps depending on kind
    GapRule gap;
    std::vector<Interval> pieces;  // explicit_list only

    static SetFamily half_line(double a);
    static SetFamily bounded(double R);
    static SetFamily periodic(double x0);
    static SetFamily dyadic_gap(GapRule rule);
    static SetFamily polynomial_gap(double eps);
    static SetFamily explicit_list(std::vector<Interval> pieces);

    std::string describe() const;
};

class RealSet {
public:
    RealSet() = default;

    static RealSet from_intervals(std::vector<Interval> pieces);
    // Materializes the family on [-horizon, horizon].
    static RealSet generate(const SetFamily& family, double horizon);

    RealSet expanded(double horizon) const;

    const std::vector<Interval>& intervals() const { return pieces_; }
    const SetFamily& family() const { return family_; }
    bool generated() const { return family_.kind != Family::explicit_list; }
    double horizon() const { return horizon_; }

    double measure_in(Interval window) const;
    double total_measure() const { return cumulative_.empty() ? 0 : cumulative_.back(); }
    bool contains(double x) const;

    RealSet reflected() const;
    RealSet clipped(Interval window) const;
    RealSet united(const RealSet& other) const;
    // Complement of the set inside the window.
    RealSet complement_in(Interval window) const;

private:
    void normalize();
    void check_window(Interval window) const;

    std::vector<Interval> pieces_;
    std::vector<double> cumulative_;  // cumulative_[i] = total length of pieces_[0..i]
    SetFamily family_;
    double horizon_ = std::numeric_limits<double>::infinity();
};

double symmetric_density(const RealSet& set, double x);

// Exact minimum of |E ∩ [x, x+L]| / L over x in [lo, hi]: the numerator is piecewise
// linear in x, so breakpoints plus grid samples suffice.
std::pair<double, double> min_window_density(const RealSet& set, double L, double lo, double hi,
                                             double grid_step);

// Exact minimum of symmetric_density over [lo, hi].
std::pair<double, double> min_symmetric_density(const RealSet& set, double lo, double hi,
                                                double grid_step);

enum class VerdictMethod { analytic, numeric_probe };

struct ThickWitness {
    double gamma = 0;
    double L = 0;
};

struct GapWitness {
    Interval window;
    double density = 0;
};

struct ThickResult {
    bool holds = false;
    std::optional<ThickWitness> witness;
    std::optional<GapWitness> gap;
};

struct WeakResult {
    bool holds = false;
    double gamma_estimate = 0;
    std::vector<std::pair<double, double>> vanishing;  // (x_n, density at x_n)
};

struct ThicknessVerdict {
    ThickResult thick;
    WeakResult weakly_thick;
    double horizon_used = 0;
    VerdictMethod method = VerdictMethod::analytic;
};

ThicknessVerdict classify(const RealSet& set, double horizon, double grid_step);

// min over probed x >= 2L of symmetric_density(E, x) - gamma/2. Nonnegative when a
// thick witness also certifies weak thickness.
double thick_implies_weak_margin(const RealSet& set, const ThickWitness& w, double horizon,
                                 double grid_step);

RealSet parity_fold(const RealSet& set);

}  // namespace obslab
