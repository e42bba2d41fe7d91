#pragma once

#include "obslab/realset.hpp"
#include "obslab/spectra.hpp"

#include <complex>
#include <vector>

namespace obslab {

struct PhaseIntegrals {
    double s_minus = 0;  // ∫_0^x sqrt|mu^{2m} - t^{2m}| dt (odd in x)
    double s_plus = 0;   // ∫_mu^{|x|} sqrt|t^{2m} - mu^{2m}| dt (negative inside the well)
};

PhaseIntegrals phase_integrals(double mu, int m, double x);
PhaseIntegrals phase_integrals(const SpectrumTable& table, int k, double x);

enum class Region { oscillatory, turning, tail };
const char* to_string(Region r);

struct WKBValue {
    double value = 0;
    Region region = Region::oscillatory;
    double error_bound = 0;
};

struct WKBProfile {
    int k = 0;
    int m = 1;
    double lambda = 0;
    double mu = 0;
    double delta = 0;
    double half_width = 0;  // delta * mu^{-(2m-1)/3}
    Parity parity = Parity::even;
    double a_minus = 0;
    double a_plus = 0;

    double turning_envelope = 0;  // max |phi| over the turning region
    double turning_constant = 0;  // turning_envelope / mu^{(m-2)/6}

    Interval osc_window;   // |x| range of the oscillatory fit
    Interval tail_window;  // |x| range of the tail fit
    std::size_t osc_points = 0;
    std::size_t tail_points = 0;
    double osc_max_residual = 0;
    double osc_max_error_ratio = 0;     // max |phi - wkb| / error_budget over the window
    double osc_edge_budget = 0;         // error_budget at the window edge nearest the turning point
    double tail_max_residual = 0;
    double tail_logslope_spread = 0;    // spread of log|phi| + S+ + log(x^{2m}-mu^{2m})/4
    double zero_offset_cells = 0;       // zeros vs WKB nodal phases, in grid cells, over the fit window
    double zero_offset_cells_full = 0;  // same over the whole oscillatory region
    double periods = 0;                 // S-(inner edge) / pi

    double inner_edge() const { return mu - half_width; }
    double outer_edge() const { return mu + half_width; }
    double s_minus(double x) const;
    double s_plus(double x) const;
    double error_budget(double x) const;
};

WKBValue wkb_eval(const WKBProfile& profile, double x);

WKBProfile fit_amplitudes(const SpectrumTable& table, int k);

struct LiouvilleFrame {
    int k = 0;
    double lambda = 0;
    Potential potential;
    double w0 = 0;
    double w0prime = 0;
    std::complex<double> C;
    Interval omega;  // {V <= lambda/2}
    double theta0 = 0;

    double phase(double x) const;  // ∫_0^x sqrt(lambda - V)
};

LiouvilleFrame liouville_frame(const SpectrumTable& table, int k);
double amplitude_constant(const SpectrumTable& table, int k);

struct AmplitudeSweep {
    std::vector<int> ks;
    std::vector<double> mu, lambda, a_minus, a_plus, c_abs, turning_constant;
    double slope_a_minus = 0;  // log|a-| vs log mu
    double slope_a_plus = 0;   // log|a+| vs log mu
    double slope_c = 0;        // log|C| vs log lambda
    double target_a = 0;       // (m-1)/2
    double target_c = 0;       // 1/4 - 1/(4m)
    double max_error_ratio = 0;
    std::vector<WKBProfile> profiles;
};

AmplitudeSweep amplitude_sweep(const SpectrumTable& table, int k_first, int k_last);

}  // namespace obslab
