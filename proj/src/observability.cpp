#include "obslab/observability.hpp"

#include "obslab/error.hpp"
#include "obslab/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

namespace obslab {

std::vector<double> set_weights(const RealSet& set, const Grid& grid) {
    const double h = grid.h();
    if (set.generated() && set.horizon() < grid.X)
        throw Error(ErrorKind::grid_set_mismatch, "set horizon does not cover the spectral grid");
    // cell j spans [x_{j-1}, x_j] with x_{-1} = -X and x_N = X (zero boundary values)
    std::vector<double> frac(grid.N + 1);
    for (std::size_t j = 0; j <= grid.N; ++j) {
        const double lo = -grid.X + j * h;
        frac[j] = set.measure_in({lo, lo + h}) / h;
    }
    std::vector<double> w(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) w[i] = 0.5 * h * (frac[i] + frac[i + 1]);
    return w;
}

const char* to_string(MassVerdict v) {
    return v == MassVerdict::observable_evidence ? "observable-evidence" : "non-observable-evidence";
}

namespace {

std::vector<double> masses_for(const std::vector<double>& w, const SpectrumTable& table) {
    std::vector<double> e;
    e.reserve(table.K());
    for (const auto& p : table.pairs) {
        double s = 0;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * p.phi[i] * p.phi[i];
        e.push_back(s);
    }
    return e;
}

double mu_of(const SpectrumTable& t, const EigenPair& p) {
    return p.mu ? *p.mu : t.potential.turning_point(p.lambda);
}

}  // namespace

MassReport eigenmass(const RealSet& set, const SpectrumTable& table) {
    require(table.K() >= 1, "empty spectrum table");
    MassReport r;
    r.set_description = set.family().describe();
    r.potential = table.potential.describe();
    r.masses = masses_for(set_weights(set, table.grid), table);
    r.folded_masses = masses_for(set_weights(parity_fold(set), table.grid), table);
    auto it = std::min_element(r.masses.begin(), r.masses.end());
    r.inf_mass = *it;
    r.inf_index = static_cast<int>(it - r.masses.begin()) + 1;

    const int K = static_cast<int>(table.K());
    {
        // mean mass over the top octave of mu against the octave below it
        const double top = mu_of(table, table.pairs.back());
        double hi = 0, lo = 0;
        int nhi = 0, nlo = 0;
        for (int k = 1; k <= K; ++k) {
            const double mu = mu_of(table, table.pairs[k - 1]);
            if (mu > top / 2) {
                hi += r.masses[k - 1];
                ++nhi;
            } else if (mu > top / 4) {
                lo += r.masses[k - 1];
                ++nlo;
            }
        }
        if (nhi >= 2 && nlo >= 2 && hi > 0 && lo > 0) r.decay_exponent = -std::log2((hi / nhi) / (lo / nlo));
    }
    r.verdict = (r.decay_exponent >= 0.25 || r.inf_mass <= 0) ? MassVerdict::non_observable_evidence
                                                               : MassVerdict::observable_evidence;
    if (K >= 10) {
        const bool growing = gap_profile(table).tail_slope > 0.1;
        r.gap_regime = growing ? "growing" : "uniform";
        r.time_regime = growing ? "at any time" : "at some time";
    } else {
        r.gap_regime = "unknown";
        r.time_regime = "unknown";
    }
    return r;
}

double min_mass_upto(const MassReport& report, int K) {
    require(K >= 1 && K <= static_cast<int>(report.masses.size()), "K outside the report");
    return *std::min_element(report.masses.begin(), report.masses.begin() + K);
}

MassSplit mass_profile_decomposition(const RealSet& set, const SpectrumTable& table, int k) {
    require(table.potential.is_monomial(), "mass decomposition needs a monomial potential");
    require(k >= 1 && k <= static_cast<int>(table.K()), "eigenvalue index out of range");
    const EigenPair& p = table.pairs[k - 1];
    const int m = table.potential.m();
    const double mu = *p.mu;
    const double hw = 0.05 * std::pow(2.0 * m, -1.0 / 3) * std::pow(mu, -(2.0 * m - 1) / 3);
    const double a = mu - hw, b = mu + hw;
    const double X = table.grid.X;

    const RealSet osc = set.clipped({-a, a});
    const RealSet turn = set.clipped({-b, -a}).united(set.clipped({a, b}));
    const RealSet tail = set.clipped({-X - 1, -b}).united(set.clipped({b, X + 1}));
    auto mass = [&](const RealSet& E) {
        const auto w = set_weights(E, table.grid);
        double s = 0;
        for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * p.phi[i] * p.phi[i];
        return s;
    };
    MassSplit s;
    s.I1 = mass(osc);
    s.I2 = mass(turn);
    s.I3 = mass(tail);
    s.total = mass(set);
    return s;
}

std::size_t ProbeGrid::size() const {
    require(X > 0 && h > 0, "probe grid needs X > 0 and h > 0");
    const auto n = static_cast<std::size_t>(std::llround(2 * X / h));
    return periodic ? n : n - 1;
}

double ProbeGrid::spacing() const {
    const auto n = static_cast<std::size_t>(std::llround(2 * X / h));
    return 2 * X / static_cast<double>(n);
}

double ProbeGrid::node(std::size_t i) const {
    return periodic ? -X + static_cast<double>(i) * spacing() : -X + static_cast<double>(i + 1) * spacing();
}

double ResolventProbe::min_margin() const { return *std::min_element(margins.begin(), margins.end()); }

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Smallest eigenvalue of a symmetric positive semidefinite matrix by shift-invert Lanczos.
double smallest_eigenvalue(const SpMat& B, double shift, unsigned seed,
                           const std::function<double(const Eigen::VectorXd&)>& quad_form) {
    const Eigen::Index n = B.rows();
    SpMat Bs = B;
    for (Eigen::Index i = 0; i < n; ++i) Bs.coeffRef(i, i) += shift;
    Eigen::SimplicialLDLT<SpMat> ldlt(Bs);
    if (ldlt.info() != Eigen::Success)
        throw Error(ErrorKind::eigen_iteration_failure, "factorization of the shifted form failed");

    const int max_steps = std::min<int>(300, static_cast<int>(n));
    Eigen::MatrixXd V(n, max_steps + 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i) q(i) = u(rng);
    q.normalize();
    V.col(0) = q;
    std::vector<double> alpha, beta;
    double theta_prev = 0;
    int stable = 0;
    for (int j = 0; j < max_steps; ++j) {
        Eigen::VectorXd w = ldlt.solve(V.col(j));
        const double a = V.col(j).dot(w);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(j + 1) * (V.leftCols(j + 1).transpose() * w);
        const double b = w.norm();

        const int m = j + 1;
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) T(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) T(i, i + 1) = T(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const double theta = es.eigenvalues()(m - 1);
        const Eigen::VectorXd y = es.eigenvectors().col(m - 1);
        const double resid = b * std::fabs(y(m - 1));
        stable = (j >= 2 && std::fabs(theta - theta_prev) <= 1e-11 * theta) ? stable + 1 : 0;
        // clustered top Ritz values stall the residual; a settled theta is then accepted
        const bool last = j + 1 == max_steps;
        // out of steps: a Ritz value within 1e-4 of its residual bound is still a usable margin
        const bool done = (j >= 2 && resid <= 1e-9 * theta) || stable >= 3 || b <= 1e-14 * std::fabs(theta) ||
                          m == n || (last && resid <= 1e-4 * theta);
        if (done) {
            Eigen::VectorXd x = V.leftCols(m) * y;
            x.normalize();
            return quad_form(x);
        }
        theta_prev = theta;
        beta.push_back(b);
        V.col(j + 1) = w / b;
    }
    throw Error(ErrorKind::eigen_iteration_failure, "Lanczos did not converge");
}

}  // namespace

ResolventProbe resolvent_margin(const RealSet& set, const ProbeGrid& grid, double M, double m_w,
                                const std::vector<double>& lambdas, const std::optional<Potential>& potential,
                                unsigned seed) {
    require(M > 0 && m_w >= 0, "resolvent probe needs M > 0 and m_w >= 0");
    require(!lambdas.empty(), "empty lambda list");
    const std::size_t n = grid.size();
    const double h = grid.spacing();
    if (set.generated() && set.horizon() < grid.X + h)
        throw Error(ErrorKind::grid_set_mismatch, "set horizon does not cover the probe grid");
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = grid.node(i);
        d[i] = set.measure_in({x - h / 2, x + h / 2}) / h;
    }
    std::vector<double> vdiag(n, 0.0);
    if (potential)
        for (std::size_t i = 0; i < n; ++i) vdiag[i] = (*potential)(grid.node(i));

    ResolventProbe probe;
    probe.grid = grid;
    probe.M = M;
    probe.m_w = m_w;
    probe.lambdas = lambdas;
    const double ih2 = 1 / (h * h);
    const auto N = static_cast<Eigen::Index>(n);
    for (double lambda : lambdas) {
        std::vector<Eigen::Triplet<double>> trips;
        for (Eigen::Index i = 0; i < N; ++i) {
            trips.emplace_back(i, i, 2 * ih2 + vdiag[i] - lambda);
            if (i + 1 < N) {
                trips.emplace_back(i, i + 1, -ih2);
                trips.emplace_back(i + 1, i, -ih2);
            } else if (grid.periodic) {
                trips.emplace_back(i, 0, -ih2);
                trips.emplace_back(0, i, -ih2);
            }
        }
        SpMat Al(N, N);
        Al.setFromTriplets(trips.begin(), trips.end());
        SpMat B = M * SpMat(Al.transpose() * Al);
        for (Eigen::Index i = 0; i < N; ++i) B.coeffRef(i, i) += m_w * d[i];
        B.makeCompressed();
        auto quad = [&](const Eigen::VectorXd& x) {
            const Eigen::VectorXd r = Al * x;
            double s = M * r.squaredNorm();
            for (Eigen::Index i = 0; i < N; ++i) s += m_w * d[i] * x(i) * x(i);
            return s;
        };
        probe.margins.push_back(smallest_eigenvalue(B, 1e-6, seed, quad));
    }
    return probe;
}

ResolventSweep resolvent_sweep(const RealSet& set, const ProbeGrid& grid, const std::vector<double>& Ms,
                               const std::vector<double>& mws, const std::vector<double>& lambdas, unsigned seed) {
    ResolventSweep s;
    double best = -1;
    for (double M : Ms)
        for (double mw : mws) {
            s.probes.push_back(resolvent_margin(set, grid, M, mw, lambdas, std::nullopt, seed));
            const double v = s.probes.back().min_margin();
            if (v > best) {
                best = v;
                s.best = s.probes.size() - 1;
            }
        }
    return s;
}

namespace {

// ∫_E exp(-(x-x0)^2 / (2 s2)) dx
double gaussian_mass(const RealSet& E, double x0, double s2) {
    const double sd = std::sqrt(2 * s2);
    const double cut = 40 * std::sqrt(s2);
    double total = 0;
    for (const auto& p : E.intervals()) {
        const double lo = std::max(p.lo, x0 - cut), hi = std::min(p.hi, x0 + cut);
        if (hi <= lo) continue;
        total += 0.5 * std::sqrt(2 * pi * s2) * (std::erf((hi - x0) / sd) - std::erf((lo - x0) / sd));
    }
    return total;
}

}  // namespace

GaussianWitness gaussian_thickness_witness(const RealSet& set, double T, double C_obs, double x0) {
    require(T > 0 && C_obs > 0, "witness needs T > 0 and C_obs > 0");
    GaussianWitness w;
    w.T = T;
    w.C_obs = C_obs;
    w.x0 = x0;
    // v(0,x) = (4 pi)^{-1/2} exp(-(x-x0)^2/4)
    w.lhs = integrate_adaptive([x0](double x) { return std::exp(-0.5 * (x - x0) * (x - x0)) / (4 * pi); },
                               x0 - 40, x0 + 40, 1e-13);
    const double s = 1 + T * T;
    const double pref = C_obs * T / (2 * pi);
    const double arg = pref * std::sqrt(4 * pi * s) * 4 * std::sqrt(2 * pi);
    w.L = arg > 1 ? std::sqrt(16 * s * std::log(arg)) : 0.0;
    w.window = {x0 - w.L / 2, x0 + w.L / 2};
    w.tail = std::sqrt(4 * pi * s) * std::exp(-w.L * w.L / (16 * s));
    const RealSet E = set.generated() ? set.expanded(std::max(set.horizon(), std::fabs(x0) + w.L + 50 * std::sqrt(s)))
                                      : set;
    w.window_measure = w.L > 0 ? E.measure_in(w.window) : 0.0;
    w.rhs = pref * (w.window_measure + w.tail);
    w.lower_bound = std::sqrt(2 * pi) / (4 * C_obs * T);
    w.violated = w.window_measure < w.lower_bound;
    // |v(t,x)|^2 = exp(-(x-x0)^2 / (2(1+t^2))) / (4 pi sqrt(1+t^2))
    w.observed = C_obs * integrate_adaptive(
                             [&](double t) {
                                 const double q = 1 + t * t;
                                 return gaussian_mass(E, x0, q) / (4 * pi * std::sqrt(q));
                             },
                             0, T, 1e-10);
    return w;
}

std::optional<GaussianWitness> first_violation(const RealSet& set, double T, double C_obs,
                                               const std::vector<double>& x0s) {
    for (double x0 : x0s) {
        auto w = gaussian_thickness_witness(set, T, C_obs, x0);
        if (w.violated) return w;
    }
    return std::nullopt;
}

NazarovProbe nazarov_constant(double S_len, double Sigma_len, std::size_t N) {
    require(N >= 8 && (N & (N - 1)) == 0, "N must be a power of two");
    require(S_len >= 0 && Sigma_len >= 0, "interval lengths must be nonnegative");
    const double dx = std::sqrt(2 * pi / static_cast<double>(N));
    const long half = static_cast<long>(N / 2);
    require(S_len <= N * dx && Sigma_len <= N * dx, "intervals must fit the discrete line");
    // outside-weight of the cell around index j for the centered interval of length len
    auto outside = [dx](long j, double len) {
        const double lo = j * dx - dx / 2, hi = j * dx + dx / 2;
        const double ov = std::max(0.0, std::min(hi, len / 2) - std::max(lo, -len / 2));
        return 1 - ov / dx;
    };
    const auto n = static_cast<Eigen::Index>(N);
    // F* D F is the circulant with first column c_r = (1/N) sum_l d_l e^{2 pi i l r / N}
    std::vector<double> dsig(N);
    for (long j = -half; j < half; ++j) dsig[static_cast<std::size_t>(j + half)] = outside(j, Sigma_len);
    std::vector<double> c(N, 0.0);
    for (std::size_t r = 0; r < N; ++r) {
        double s = 0;
        for (long l = -half; l < half; ++l)
            s += dsig[static_cast<std::size_t>(l + half)] * std::cos(2 * pi * static_cast<double>(l) * r / N);
        c[r] = s / N;
    }
    Eigen::MatrixXd P(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b < n; ++b) {
            const std::size_t r = static_cast<std::size_t>(((a - b) % n + n) % n);
            P(a, b) = 0.5 * c[r];
        }
    for (long j = -half; j < half; ++j) P(j + half, j + half) += 0.5 * outside(j, S_len);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P, Eigen::EigenvaluesOnly);
    NazarovProbe probe;
    probe.S = S_len;
    probe.Sigma = Sigma_len;
    probe.N = N;
    probe.best_constant = 1 / es.eigenvalues()(0);
    return probe;
}

NazarovSweep nazarov_sweep(const std::vector<double>& products, std::size_t N) {
    require(products.size() >= 2, "sweep needs two or more products");
    NazarovSweep s;
    s.products = products;
    for (double p : products) {
        const double side = std::sqrt(p);
        s.log_best.push_back(std::log(nazarov_constant(side, side, N).best_constant));
    }
    for (std::size_t i = 1; i < products.size(); ++i) {
        if (s.log_best[i] < s.log_best[i - 1] - 1e-12) s.nondecreasing = false;
        s.max_rate = std::max(s.max_rate, (s.log_best[i] - s.log_best[0]) / (products[i] - products[0]));
    }
    s.slope = fit_line(s.products, s.log_best).slope;
    return s;
}

}  // namespace obslab
