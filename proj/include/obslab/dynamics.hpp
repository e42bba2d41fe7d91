#pragma once

#include "obslab/realset.hpp"
#include "obslab/spectra.hpp"

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

// Time evolution for the oscillator H = -d^2/dx^2 + x^2 (eigenvalues 2k - 1).
namespace obslab {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Odd node count with spacing at most h.
Grid uniform_grid(double X, double h);

CVec sample(const Grid& grid, const std::function<Complex(double)>& f);
double l2_norm(const Grid& grid, const CVec& f);
double l2_distance(const Grid& grid, const CVec& a, const CVec& b);
// || |a| - |b| ||
double modulus_distance(const Grid& grid, const CVec& a, const CVec& b);
// mass of f on the set, partial cells weighted by overlap
double mass_on(const RealSet& set, const Grid& grid, const CVec& f);

enum class Provenance { eigen, mehler, resonant };
const char* to_string(Provenance p);

struct PropagatorState {
    double t = 0;
    Grid grid;
    CVec psi;
    double norm = 0;
    Provenance provenance = Provenance::eigen;
    double truncation_defect = 0;  // 1 - captured fraction of ||f||^2 (eigen only)
    std::size_t quadrature_points = 0;  // y samples (mehler only)
};

// psi(t) = sum_k e^{-i lambda_k t} <f, phi_k> phi_k. Throws insufficient_modes when the
// table misses more than max_defect of ||f||^2.
PropagatorState evolve_eigen(const CVec& f, double t, const SpectrumTable& table, double max_defect = 1e-8);

// e^{-iH t} kernel, t away from multiples of pi/2.
struct MehlerKernel {
    double t = 0;
    double inv_sin = 0;  // 1 / sin 2t
    double cot = 0;      // cot 2t
    Complex prefactor;   // e^{-i pi/4} e^{-i pi n/2} (2 pi |sin 2t|)^{-1/2}, n = floor(2t/pi)

    static MehlerKernel at(double t);
    Complex operator()(double x, double y) const;
};

constexpr double resonant_band = 1e-3;
// n with |t - n pi/2| < band
std::optional<int> resonant_index(double t, double band = resonant_band);

// t = n pi/2: psi(x) = e^{-i n pi/2} f((-1)^n x)
PropagatorState evolve_resonant(const CVec& f, const Grid& grid, int n);

// Trapezoid over y with at least 8 samples per kernel oscillation; f is refined by
// local interpolation when the grid is too coarse. Throws resonant_time inside the band.
PropagatorState evolve_mehler(const CVec& f, const Grid& grid, double t);
PropagatorState evolve_mehler(const std::function<Complex(double)>& f, const Grid& grid, double t);

// Mehler away from resonance, the exact reflection identity inside the band.
PropagatorState evolve(const CVec& f, const Grid& grid, double t);

// K_z(x, y) of e^{-zH}, Re z > 0.
Complex heat_kernel(Complex z, double x, double y);

struct KernelBoundFit {
    double T = 0;
    double C = 0;            // max of |K| s^{1/2} exp(s|x-y|^2 / (4(s^2+t^2))) over the fit batch
    double check_max = 0;    // same over a fresh batch
    double slack = 1.05;
    std::size_t samples = 0;
    bool holds = false;      // check_max <= slack * C
    double free_limit = 0;   // 1/sqrt(4 pi), the s -> 0 diagonal value
};

KernelBoundFit fit_kernel_bound(double T, std::size_t samples = 10000, unsigned seed = 11);

// u_{0,k} = pi^{-1/4} e^{-x^2/2 - ikx} evolved in closed form.
Complex coherent_value(double k, double t, double x);
CVec coherent_state(double k, double t, const Grid& grid);
// integral over the set of |u_k(t, x)|^2 = pi^{-1/2} e^{-(x + k sin 2t)^2}
double coherent_mass(const RealSet& set, double k, double t);

struct MinimalTimeTable {
    std::vector<double> T;
    std::vector<double> k;
    std::vector<std::vector<double>> Q;          // Q[i][j] at T[i], k[j], step dt
    std::vector<std::vector<double>> Q_refined;  // step dt/2
    double dt = 0.01;
    bool stable = true;  // every entry agrees with its refinement to two digits
    double max_change = 0;
};

MinimalTimeTable minimal_time_scan(const RealSet& set, const std::vector<double>& T_list,
                                   const std::vector<double>& k_list, double dt = 0.01);

struct TwoTimeRecord {
    double S = 0;
    double T = 0;
    double norm2 = 0;
    double mass_S = 0;  // on E1 at time S
    double mass_T = 0;  // on E2 at time T
    double quotient = 0;  // +inf when both masses vanish
    bool resonant = false;  // T - S on the pi/2 lattice
    std::string regime;
};

TwoTimeRecord two_time_quotient(const CVec& f, double S, double T, const RealSet& E1, const RealSet& E2,
                                const SpectrumTable& table);

struct HeatWitness {
    double y0 = 0;
    double T = 0;
    double C_obs = 0;
    double lhs = 0;               // ||K_1(., y0)||^2
    double projection_bound = 0;  // e^{-2} |Phi_0(y0)|^2
    bool lhs_ok = false;
    double rho = 1;               // max(1, |y0|)
    double L = 0;                 // smallest L with C_obs int_0^T int_{|x-y0|>L rho} |v|^2 <= lhs/2
    Interval window;
    double tail = 0;
    double peak = 0;              // max over t, x of |v|^2
    double measure_bound = 0;     // lhs / (2 C_obs T peak)
    double window_measure = 0;
    double window_mass = 0;       // C_obs int_0^T int_{E cap window} |v|^2
    bool satisfied = false;
};

// v(t, x) = K_{1+it}(x, y0), handled in closed form as a Gaussian in x.
HeatWitness heat_witness(const RealSet& set, double y0, double T, double C_obs);

}  // namespace obslab
