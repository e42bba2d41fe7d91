#pragma once

#include "obslab/realset.hpp"
#include "obslab/spectra.hpp"
#include "obslab/wkb.hpp"

#include <optional>
#include <string>
#include <vector>

namespace obslab {

// Node weights w_i with sum_i w_i f(x_i)^2 = trapezoid of f^2 over E, each cell scaled by
// the fraction of it covered by E.
std::vector<double> set_weights(const RealSet& set, const Grid& grid);

enum class MassVerdict { observable_evidence, non_observable_evidence };
const char* to_string(MassVerdict v);

struct MassReport {
    std::string set_description;
    std::string potential;
    std::vector<double> masses;         // e_k, k = 1..K
    std::vector<double> folded_masses;  // same for the parity fold
    double inf_mass = 0;
    int inf_index = 0;
    double decay_exponent = 0;  // -log2 of mean e_k over the top mu-octave relative to the octave below
    MassVerdict verdict = MassVerdict::observable_evidence;
    std::string gap_regime;   // "uniform" or "growing"
    std::string time_regime;  // "at some time" or "at any time"
};

MassReport eigenmass(const RealSet& set, const SpectrumTable& table);

// min over k <= K of e_k
double min_mass_upto(const MassReport& report, int K);

struct MassSplit {
    double I1 = 0;  // oscillatory region
    double I2 = 0;  // turning region
    double I3 = 0;  // tail
    double total = 0;
};

MassSplit mass_profile_decomposition(const RealSet& set, const SpectrumTable& table, int k);

struct ProbeGrid {
    double X = 40;
    double h = 0.05;
    bool periodic = true;
    std::size_t size() const;
    double spacing() const;
    double node(std::size_t i) const;
    double reliable_lambda() const { return 0.25 / (spacing() * spacing()); }
};

struct ResolventProbe {
    ProbeGrid grid;
    double M = 0;
    double m_w = 0;
    std::vector<double> lambdas;
    std::vector<double> margins;
    double min_margin() const;
};

ResolventProbe resolvent_margin(const RealSet& set, const ProbeGrid& grid, double M, double m_w,
                                const std::vector<double>& lambdas,
                                const std::optional<Potential>& potential = std::nullopt, unsigned seed = 7);

struct ResolventSweep {
    std::vector<ResolventProbe> probes;
    std::size_t best = 0;  // index with the largest min margin
};

ResolventSweep resolvent_sweep(const RealSet& set, const ProbeGrid& grid, const std::vector<double>& Ms,
                               const std::vector<double>& mws, const std::vector<double>& lambdas,
                               unsigned seed = 7);

struct GaussianWitness {
    double T = 0;
    double C_obs = 0;
    double x0 = 0;
    double L = 0;
    Interval window;
    double lhs = 0;          // ||v(0)||^2 by quadrature
    double rhs = 0;          // C T/(2 pi) (|E ∩ W| + tail)
    double tail = 0;         // sqrt(4 pi (1+T^2)) exp(-L^2/(16(1+T^2)))
    double window_measure = 0;
    double lower_bound = 0;  // sqrt(2 pi)/(4 C T)
    double observed = 0;     // C ∫_0^T ∫_E |v|^2 for the explicit free solution
    bool violated = false;   // window_measure < lower_bound
};

GaussianWitness gaussian_thickness_witness(const RealSet& set, double T, double C_obs, double x0);

// First x0 in the list where the implied bound fails.
std::optional<GaussianWitness> first_violation(const RealSet& set, double T, double C_obs,
                                               const std::vector<double>& x0s);

struct NazarovProbe {
    double S = 0;
    double Sigma = 0;
    std::size_t N = 0;
    double best_constant = 0;  // 1 / lambda_min(½(D_{S^c} + F* D_{Σ^c} F))
};

NazarovProbe nazarov_constant(double S_len, double Sigma_len, std::size_t N);

struct NazarovSweep {
    std::vector<double> products;  // |S||Σ|
    std::vector<double> log_best;
    bool nondecreasing = true;
    double slope = 0;         // least squares of log best vs |S||Σ|
    double max_rate = 0;      // max over p of (log C(p) - log C(p_0)) / (p - p_0)
};

// S = Σ = sqrt(p) for each product p.
NazarovSweep nazarov_sweep(const std::vector<double>& products, std::size_t N);

}  // namespace obslab
