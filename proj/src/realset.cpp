#include "obslab/realset.hpp"

#include "obslab/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obslab {

const char* to_string(Family f) {
    switch (f) {
        case Family::explicit_list: return "explicit";
        case Family::half_line: return "halfline";
        case Family::bounded: return "bounded";
        case Family::periodic: return "periodic";
        case Family::dyadic_gap: return "dyadic_gap";
        case Family::polynomial_gap: return "polynomial_gap";
    }
    return "unknown";
}

double GapRule::at(int j) const { return coeff * std::pow(static_cast<double>(j), power); }

SetFamily SetFamily::half_line(double a) {
    SetFamily f;
    f.kind = Family::half_line;
    f.param = a;
    return f;
}

SetFamily SetFamily::bounded(double R) {
    require(R >= 0, "bounded set needs R >= 0");
    SetFamily f;
    f.kind = Family::bounded;
    f.param = R;
    return f;
}

SetFamily SetFamily::periodic(double x0) {
    require(x0 > 0, "periodic pattern needs x0 > 0");
    SetFamily f;
    f.kind = Family::periodic;
    f.param = x0;
    return f;
}

SetFamily SetFamily::dyadic_gap(GapRule rule) {
    require(rule.coeff > 0, "dyadic gap rule needs a positive coefficient");
    SetFamily f;
    f.kind = Family::dyadic_gap;
    f.gap = rule;
    return f;
}

SetFamily SetFamily::polynomial_gap(double eps) {
    require(eps > 0, "polynomial gap needs eps > 0");
    SetFamily f;
    f.kind = Family::polynomial_gap;
    f.param = eps;
    return f;
}

SetFamily SetFamily::explicit_list(std::vector<Interval> pieces) {
    SetFamily f;
    f.pieces = std::move(pieces);
    return f;
}

std::string SetFamily::describe() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
        case Family::half_line: os << "(a=" << param << ")"; break;
        case Family::bounded: os << "(R=" << param << ")"; break;
        case Family::periodic: os << "(x0=" << param << ")"; break;
        case Family::dyadic_gap: os << "(a_j=" << gap.coeff << "*j^" << gap.power << ")"; break;
        case Family::polynomial_gap: os << "(eps=" << param << ")"; break;
        case Family::explicit_list: os << "(" << pieces.size() << " intervals)"; break;
    }
    return os.str();
}

void RealSet::normalize() {
    std::vector<Interval> v;
    v.reserve(pieces_.size());
    for (const auto& p : pieces_) {
        require(!(p.hi < p.lo), "interval with hi < lo");
        require(std::isfinite(p.lo) && std::isfinite(p.hi), "interval endpoints must be finite");
        if (p.hi > p.lo) v.push_back(p);
    }
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    pieces_.clear();
    for (const auto& p : v) {
        if (!pieces_.empty() && p.lo <= pieces_.back().hi)
            pieces_.back().hi = std::max(pieces_.back().hi, p.hi);
        else
            pieces_.push_back(p);
    }
    cumulative_.resize(pieces_.size());
    double s = 0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        s += pieces_[i].length();
        cumulative_[i] = s;
    }
}

RealSet RealSet::from_intervals(std::vector<Interval> pieces) {
    RealSet r;
    r.family_ = SetFamily::explicit_list(pieces);
    r.pieces_ = std::move(pieces);
    r.normalize();
    return r;
}

RealSet RealSet::generate(const SetFamily& family, double H) {
    if (family.kind == Family::explicit_list) return from_intervals(family.pieces);
    require(std::isfinite(H) && H > 0, "generated sets need a finite positive horizon");
    RealSet r;
    r.family_ = family;
    r.horizon_ = H;
    auto add = [&](double lo, double hi) {
        lo = std::max(lo, -H);
        hi = std::min(hi, H);
        if (hi > lo) r.pieces_.push_back({lo, hi});
    };
    switch (family.kind) {
        case Family::half_line: add(family.param, H); break;
        case Family::bounded: add(-family.param, family.param); break;
        case Family::periodic: {
            const double x0 = family.param;
            const long k0 = static_cast<long>(std::floor(-H / x0)) - 1;
            const long k1 = static_cast<long>(std::ceil(H / x0)) + 1;
            for (long k = k0; k <= k1; ++k) add(k * x0, (k + 0.5) * x0);
            break;
        }
        case Family::dyadic_gap: {
            for (int j = 1; std::ldexp(1.0, j) < H; ++j) {
                const double a = family.gap.at(j);
                const double lo = std::ldexp(1.0, j), hi = std::ldexp(1.0, j + 1);
                // a_j = 2^{j-1} still leaves a piece of positive length
                if (!(a > 0 && a <= std::ldexp(1.0, j - 1)))
                    throw Error(ErrorKind::precondition,
                                "dyadic gap rule violates 0 < a_j <= 2^(j-1) at j=" + std::to_string(j));
                add(lo, hi - a);
                add(-hi + a, -lo);
            }
            break;
        }
        case Family::polynomial_gap: {
            const double eps = family.param;
            for (long j = 1; j < H; ++j)
                add(static_cast<double>(j), j + std::pow(static_cast<double>(j + 1), -eps));
            break;
        }
        case Family::explicit_list: break;
    }
    r.normalize();
    return r;
}

RealSet RealSet::expanded(double horizon) const {
    if (!generated() || horizon <= horizon_) return *this;
    return generate(family_, horizon);
}

void RealSet::check_window(Interval w) const {
    require(!(w.hi < w.lo), "window with hi < lo");
    if (generated() && (w.lo < -horizon_ || w.hi > horizon_)) {
        std::ostringstream os;
        os << "window [" << w.lo << ", " << w.hi << "] exceeds horizon " << horizon_;
        throw Error(ErrorKind::horizon_too_small, os.str());
    }
}

double RealSet::measure_in(Interval w) const {
    check_window(w);
    if (pieces_.empty() || w.hi <= w.lo) return 0;
    // first piece ending after w.lo, last piece starting before w.hi
    auto first = std::upper_bound(pieces_.begin(), pieces_.end(), w.lo,
                                  [](double v, const Interval& p) { return v < p.hi; });
    auto last = std::lower_bound(pieces_.begin(), pieces_.end(), w.hi,
                                 [](const Interval& p, double v) { return p.lo < v; });
    if (first >= last) return 0;
    const std::size_t i = first - pieces_.begin();
    const std::size_t j = (last - pieces_.begin()) - 1;
    double s = cumulative_[j] - (i > 0 ? cumulative_[i - 1] : 0.0);
    s -= std::max(0.0, w.lo - pieces_[i].lo);
    s -= std::max(0.0, pieces_[j].hi - w.hi);
    return std::max(0.0, s);
}

bool RealSet::contains(double x) const {
    auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                               [](double v, const Interval& p) { return v < p.lo; });
    if (it == pieces_.begin()) return false;
    --it;
    return x <= it->hi;
}

RealSet RealSet::reflected() const {
    std::vector<Interval> v;
    v.reserve(pieces_.size());
    for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) v.push_back({-it->hi, -it->lo});
    RealSet r = from_intervals(std::move(v));
    r.horizon_ = horizon_;
    return r;
}

RealSet RealSet::clipped(Interval w) const {
    std::vector<Interval> v;
    for (const auto& p : pieces_) {
        const double lo = std::max(p.lo, w.lo), hi = std::min(p.hi, w.hi);
        if (hi > lo) v.push_back({lo, hi});
    }
    RealSet r = from_intervals(std::move(v));
    // fully determined when the window sits inside the materialized range
    if (generated() && (w.lo < -horizon_ || w.hi > horizon_)) r.horizon_ = horizon_;
    return r;
}

RealSet RealSet::united(const RealSet& other) const {
    std::vector<Interval> v = pieces_;
    v.insert(v.end(), other.pieces_.begin(), other.pieces_.end());
    RealSet r = from_intervals(std::move(v));
    r.horizon_ = std::min(horizon_, other.horizon_);
    return r;
}

RealSet RealSet::complement_in(Interval w) const {
    std::vector<Interval> v;
    double cursor = w.lo;
    for (const auto& p : pieces_) {
        if (p.hi <= w.lo) continue;
        if (p.lo >= w.hi) break;
        if (p.lo > cursor) v.push_back({cursor, p.lo});
        cursor = std::max(cursor, p.hi);
    }
    if (cursor < w.hi) v.push_back({cursor, w.hi});
    RealSet r = from_intervals(std::move(v));
    if (generated() && (w.lo < -horizon_ || w.hi > horizon_)) r.horizon_ = horizon_;
    return r;
}

double symmetric_density(const RealSet& set, double x) {
    require(x > 0, "symmetric_density needs x > 0");
    return set.measure_in({-x, x}) / x;
}

namespace {

template <class F>
std::pair<double, double> minimize_on_candidates(F&& value, std::vector<double>& xs, double lo,
                                                 double hi, double grid_step) {
    if (grid_step > 0) {
        const long n = static_cast<long>(std::floor((hi - lo) / grid_step));
        for (long i = 0; i <= n; ++i) xs.push_back(lo + i * grid_step);
    }
    xs.push_back(lo);
    xs.push_back(hi);
    double best = std::numeric_limits<double>::infinity(), at = lo;
    for (double x : xs) {
        if (x < lo || x > hi) continue;
        const double v = value(x);
        if (v < best) {
            best = v;
            at = x;
        }
    }
    return {best, at};
}

}  // namespace

std::pair<double, double> min_window_density(const RealSet& set, double L, double lo, double hi,
                                             double grid_step) {
    require(L > 0 && hi >= lo, "min_window_density needs L > 0 and lo <= hi");
    std::vector<double> xs;
    for (const auto& p : set.intervals()) {
        if (p.hi < lo - L || p.lo > hi + L) continue;
        xs.insert(xs.end(), {p.lo, p.hi, p.lo - L, p.hi - L});
    }
    return minimize_on_candidates([&](double x) { return set.measure_in({x, x + L}) / L; }, xs, lo,
                                  hi, grid_step);
}

std::pair<double, double> min_symmetric_density(const RealSet& set, double lo, double hi,
                                                double grid_step) {
    require(lo > 0 && hi >= lo, "min_symmetric_density needs 0 < lo <= hi");
    std::vector<double> xs;
    for (const auto& p : set.intervals()) {
        for (double e : {p.lo, p.hi}) {
            const double a = std::fabs(e);
            if (a >= lo && a <= hi) xs.push_back(a);
        }
    }
    return minimize_on_candidates([&](double x) { return symmetric_density(set, x); }, xs, lo, hi,
                                  grid_step);
}

namespace {

constexpr double kProbeLMax = 64.0;

std::vector<double> probe_lengths() {
    std::vector<double> v;
    for (int e = -3; e <= 6; ++e) v.push_back(std::ldexp(1.0, e));
    return v;
}

// Largest grid gamma in {0.01, ..., 0.5} not above rho, or 0.
double grid_gamma(double rho) {
    double g = 0;
    for (int i = 1; i <= 50; ++i)
        if (i * 0.01 <= rho + 1e-12) g = i * 0.01;
    return g;
}

std::vector<std::pair<double, double>> density_samples(const RealSet& set, double H) {
    std::vector<std::pair<double, double>> v;
    for (int i = 0; i <= 4; ++i) {
        const double x = H / 4 * std::pow(4.0, i / 4.0);
        v.emplace_back(x, symmetric_density(set, x));
    }
    return v;
}

void check_family_horizon(const SetFamily& f, double H) {
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw Error(ErrorKind::precondition, std::string("classify horizon too small: ") + what);
    };
    need(H >= 32, "need at least 4 dyadic generations (horizon >= 32)");
    switch (f.kind) {
        case Family::half_line: need(H >= std::fabs(f.param) + kProbeLMax, "half-line witness"); break;
        case Family::bounded: need(H >= 4 * f.param + kProbeLMax, "bounded tail window"); break;
        case Family::periodic: need(H >= 1000 * f.param, "need 10^3 pattern periods"); break;
        case Family::polynomial_gap: need(H >= 1000, "need 10^3 pattern periods"); break;
        default: break;
    }
}

ThicknessVerdict classify_family(const RealSet& E, double H, double grid_step) {
    const SetFamily& f = E.family();
    ThicknessVerdict v;
    v.horizon_used = H;
    v.method = VerdictMethod::analytic;
    switch (f.kind) {
        case Family::half_line: {
            const double a = f.param;
            v.thick.gap = GapWitness{{a - kProbeLMax, a}, E.measure_in({a - kProbeLMax, a}) / kProbeLMax};
            v.weakly_thick.holds = true;
            v.weakly_thick.gamma_estimate = 1.0;
            break;
        }
        case Family::bounded: {
            const double R = f.param;
            v.thick.gap = GapWitness{{R, R + kProbeLMax}, E.measure_in({R, R + kProbeLMax}) / kProbeLMax};
            v.weakly_thick.gamma_estimate = min_symmetric_density(E, H / 4, H, grid_step).first;
            v.weakly_thick.vanishing = density_samples(E, H);
            break;
        }
        case Family::periodic: {
            v.thick.holds = true;
            v.thick.witness = ThickWitness{0.5, f.param};
            v.weakly_thick.holds = true;
            v.weakly_thick.gamma_estimate = 1.0;
            break;
        }
        case Family::dyadic_gap: {
            v.weakly_thick.holds = true;
            v.weakly_thick.gamma_estimate = min_symmetric_density(E, H / 4, H, grid_step).first;
            if (f.gap.bounded()) {
                // widest gap is the central (-2, 2) or the largest a_j, attained at j = 1
                const double G = std::max(4.0, f.gap.at(1));
                const double L = 2 * G;
                const double rho = min_window_density(E, L, -H, H - L, grid_step).first;
                v.thick.holds = true;
                v.thick.witness = ThickWitness{rho, L};
            } else {
                int j = 1;
                while (std::ldexp(1.0, j + 2) <= H) ++j;
                const double top = std::ldexp(1.0, j + 1);
                const Interval w{top - f.gap.at(j), top};
                v.thick.gap = GapWitness{w, E.measure_in(w) / w.length()};
            }
            break;
        }
        case Family::polynomial_gap: {
            const Interval w{H - kProbeLMax, H};
            v.thick.gap = GapWitness{w, E.measure_in(w) / kProbeLMax};
            v.weakly_thick.gamma_estimate = min_symmetric_density(E, H / 4, H, grid_step).first;
            v.weakly_thick.vanishing = density_samples(E, H);
            break;
        }
        case Family::explicit_list: break;
    }
    return v;
}

ThicknessVerdict classify_explicit(const RealSet& E, double H, double grid_step) {
    ThicknessVerdict v;
    v.horizon_used = H;
    v.method = VerdictMethod::numeric_probe;

    double best_rho = -1, best_L = 0;
    GapWitness worst{{-H, -H + kProbeLMax}, 1.0};
    for (double L : probe_lengths()) {
        if (L > 2 * H) continue;
        auto [rho, at] = min_window_density(E, L, -H, H - L, grid_step);
        if (rho > best_rho) {
            best_rho = rho;
            best_L = L;
        }
        if (L == kProbeLMax || rho < worst.density) worst = GapWitness{{at, at + L}, rho};
    }
    const double gamma = grid_gamma(best_rho);
    if (gamma > 0) {
        v.thick.holds = true;
        v.thick.witness = ThickWitness{gamma, best_L};
    } else {
        v.thick.gap = worst;
    }

    const double est = min_symmetric_density(E, H / 4, H, grid_step).first;
    const double tail = (E.measure_in({-H, H}) - E.measure_in({-H / 4, H / 4})) / (1.5 * H);
    v.weakly_thick.gamma_estimate = est;
    if (est >= 0.01 && tail >= 0.01) {
        v.weakly_thick.holds = true;
    } else if (est < 0.01 || tail < 0.001) {
        v.weakly_thick.holds = false;
        v.weakly_thick.vanishing = density_samples(E, H);
    } else {
        throw Error(ErrorKind::inconclusive,
                    "symmetric density stays positive but the tail barely grows within the horizon");
    }
    if (v.thick.holds && !v.weakly_thick.holds)
        throw Error(ErrorKind::inconclusive, "window probe and density probe disagree within the horizon");
    return v;
}

}  // namespace

ThicknessVerdict classify(const RealSet& set, double horizon, double grid_step) {
    require(horizon > 0 && grid_step > 0, "classify needs positive horizon and grid_step");
    if (!set.generated()) return classify_explicit(set, horizon, grid_step);
    check_family_horizon(set.family(), horizon);
    const RealSet E = set.horizon() >= horizon ? set : set.expanded(horizon);
    return classify_family(E, horizon, grid_step);
}

double thick_implies_weak_margin(const RealSet& set, const ThickWitness& w, double horizon,
                                 double grid_step) {
    const RealSet E = set.expanded(horizon);
    require(2 * w.L < horizon, "horizon must exceed 2L");
    return min_symmetric_density(E, 2 * w.L, horizon, grid_step).first - w.gamma / 2;
}

RealSet parity_fold(const RealSet& set) {
    const double inf = std::numeric_limits<double>::infinity();
    return set.clipped({0, inf}).united(set.clipped({-inf, 0}).reflected());
}

}  // namespace obslab
