#pragma once

#include <functional>
#include <vector>

#include "cnslab/semigroup.hpp"
#include "cnslab/stats.hpp"

namespace cnslab {

// Row of the probe CSV: (d, p, k, tau, value, fitted_slope, ci_low, ci_high).
struct ProbeRow {
  int d = 3;
  double p = 1;
  int k = 0;
  double tau = 0;
  double value = 0;
  double fitted_slope = 0;
  double ci_low = 0;
  double ci_high = 0;
};

using RadialSymbol = std::function<cplx(double rho)>;

// Smooth window supported on the plateau [1.01, 2] of the block-0 cutoff, so
// the block projector acts on it as the identity.
double plateau_window(double rho);
SpectralField plateau_data(const GridSpec& g);

// L^p norms (for each p) of F^{-1}(m * fhat) for a real fhat and a complex
// radial symbol m; the result is complex-valued and measured by modulus.
std::vector<double> complex_radial_norms(const SpectralField& fhat, const RadialSymbol& m, const std::vector<double>& ps);

// Amplification of a radial symbol on block-0 data. For p in {1, inf} this is
// the operator-norm ratio ||K_m||_1 / ||K_1||_1 of the convolution kernels;
// for p = 2 it is the exact Plancherel ratio; otherwise the test-function ratio.
double amplification(const SpectralField& window, const RadialSymbol& m, double p);

struct LowDecayConfig {
  int d = 3;
  double p = 1;
  std::vector<int> k_list{-5, -4, -3, -2};
  std::vector<double> tau_list{4.0};
  int n = 256;
  double L = 300.0;             // block-0 grid onto which every block k is rescaled
  double support_radius = 16.0;  // spatial radius of the test kernel
  LameParams prm;
};

struct DecayFit {
  double tau = 0;
  LineFit fit;
};

struct LowDecayResult {
  std::vector<ProbeRow> rows;
  std::vector<DecayFit> fits;
};

// Largest normalized time tau for which block k passes the wrap guard.
double max_admissible_tau(const LowDecayConfig& cfg, int k);
LowDecayResult low_decay_probe(const LowDecayConfig& cfg);

struct WaveConfig {
  int d = 3;
  std::vector<double> t_list{0.25, 0.5, 1.0, 4.0, 4.0 * 1.4142135623730951, 8.0, 8.0 * 1.4142135623730951, 16.0};
  int n = 128;
  double L = 96.0;
  double support_radius = 16.0;
  double fit_lo = 4.0, fit_hi = 16.0;
};

struct WaveResult {
  std::vector<ProbeRow> rows;  // value = ||e^{itD} K||_1 / ||K||_1
  LineFit fit;                 // log value vs log t over [fit_lo, fit_hi]
  double small_t_max_ratio = 0;  // max ratio for t <= 1
};

WaveResult wave_growth_probe(const WaveConfig& cfg);

struct ScalingConfig {
  int d = 2;
  int n = 128;
  double L = 2.0 * kPi * 16.0;
  unsigned seed = 7;
  LameParams prm;
};

// Relative error between ||e^{-t h(D)} Delta_k f||_p on the base grid and
// 2^{-kd/p} ||e^{-t h(2^k D)} Delta_0 f_k||_p on the dilated grid.
double scaling_identity_check(int k, double p, double t, const ScalingConfig& cfg = {});

// h = -lam_plus and the wave-free part htilde = h + i sqrt(gamma) |xi|.
cplx h_symbol(double rho, const LameParams& prm = {});
cplx htilde_symbol(double rho, const LameParams& prm = {});

struct ParabolicConfig {
  int d = 3;
  int n = 64;
  double L = 64.0;
  std::vector<double> tau_list{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
  LameParams prm;
};

struct ParabolicResult {
  std::vector<ProbeRow> rows;  // value = upper ratio
  std::vector<double> upper_per_k, lower_per_k;
  double max_upper = 0;
  double min_lower = 0;
  double variation = 0;  // max/min of upper_per_k
};

ParabolicResult parabolic_bound_probe(const RadialSymbol& htilde, const std::vector<int>& k_list, double p,
                                      const ParabolicConfig& cfg = {});

}  // namespace cnslab
