#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnslab/besov.hpp"
#include "cnslab/semigroup.hpp"

namespace cnslab {

// P(rho) = gamma rho^kappa / kappa, so P'(1) = gamma.
struct PressureLaw {
  double kappa = 2.0;
  double gamma = 1.0;

  void validate() const;
  double P(double rho) const;
  double G_prime(double a) const;  // P'(1+a)/(1+a)
  double k(double a) const;        // G'(a) - gamma
  double G_times_a(double a) const;  // P(1+a) - P(1) - gamma a
  static double I(double a) { return a / (1.0 + a); }
};

enum class Formulation { Velocity, Momentum };
const char* formulation_name(Formulation f);

struct SolverParams {
  LameParams lame;
  PressureLaw pressure;
  bool dealias = true;
  double vacuum_guard = 0.1;
  bool linear_only = false;  // zero the nonlinearity

  void validate() const;
};

// Physical-space states; a is scalar, u / m are d-component vector fields.
struct StateUV {
  double t = 0;
  RealField a, u;
};
struct StateAM {
  double t = 0;
  RealField a, m;
};

class VacuumError : public Error {
 public:
  VacuumError(double min_density, std::size_t location);
  double min_density;
  std::size_t location;  // flat grid index of the minimum
};

// Throws VacuumError when 1 + a < guard somewhere.
void check_vacuum(const RealField& a, double guard);

StateAM to_momentum(const StateUV& s, double guard = 0.1);
StateUV to_velocity(const StateAM& s, double guard = 0.1);

SpectralState to_spectral(const StateUV& s);
SpectralState to_spectral(const StateAM& s);
StateUV to_uv(const SpectralState& s);
StateAM to_am(const SpectralState& s);

// Velocity form: f = -div(a u), g = -u.grad u - I(a) A u - k(a) grad a.
std::pair<SpectralField, SpectralField> nonlinearity_uv(const SpectralState& s, const SolverParams& sp);

struct MomentumTerms {
  SpectralField h1, h2, h3;
};
// h1 = -div(m (x) m / (1+a)), h2 = -A(I(a) m), h3 = -grad(G(a) a).
MomentumTerms momentum_terms(const SpectralState& s, const SolverParams& sp);
// (0, h1 + h2 + h3); the mass equation of the momentum form is linear.
std::pair<SpectralField, SpectralField> nonlinearity_am(const SpectralState& s, const SolverParams& sp);

std::pair<SpectralField, SpectralField> nonlinearity(const SpectralState& s, const SolverParams& sp, Formulation f);

// Largest admissible dt: min(2 / stiff rate at the largest retained radius,
// 0.5 dx / max|u|).
double stability_cap(const GridSpec& g, const SolverParams& sp, double max_speed);

// Exponential time differencing, second order (Cox-Matthews).
class EtdStepper {
 public:
  EtdStepper(const GridSpec& g, double dt, const SolverParams& sp, Formulation f);
  SpectralState step(const SpectralState& s) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  SolverParams sp_;
  Formulation form_;
  ModeTable E_, P1_, P2_;
};

struct DiagnosticsRow {
  double t = 0;
  double X_low_inf = 0, X_low_2 = 0, X_low_1 = 0;
  double a_high_inf = 0, a_high_1 = 0, u_high_inf = 0, u_high_1 = 0;
  double mass = 0, min_density = 1;
};

struct SimConfig {
  double dt = 1e-3;
  double T = 1.0;
  Formulation form = Formulation::Velocity;
  SolverParams sp;
  TrackRequest track;
  std::optional<int> k0;
  int sample_stride = 10;  // maximal step gap between norm samples
  bool dense_early = true;  // geometric sampling near t = 0
  int snapshot_stride = 0;  // 0: no snapshots
  double blowup_factor = 1e6;
  bool enforce_cap = true;
};

struct Trajectory {
  NormTracker tracker;
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<SpectralState> snapshots;
  SpectralState final_state;  // last valid state
  int steps = 0;
  double max_mass_drift_per_step = 0;
  double momentum_drift = 0;   // max |int m (t) - int m (0)| (momentum form)
  bool failed = false;
  std::string failure;
};

// Norm sampling step indices for n_steps steps.
std::vector<int> sample_schedule(int n_steps, int stride, bool dense_early);

Trajectory simulate(const SimConfig& cfg, const SpectralState& init);

// w = grad(-Lap)^{-1} a + Q u.
SpectralField effective_velocity(const SpectralState& s);
// Relative residual of the effective-velocity equation at the middle state,
// time derivative by central difference over spacing h.
double effective_velocity_residual(const SpectralState& prev, const SpectralState& mid, const SpectralState& next,
                                   double h, const SolverParams& sp);

}  // namespace cnslab
