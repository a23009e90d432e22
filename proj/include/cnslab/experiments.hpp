#pragma once

#include <functional>
#include <future>
#include <string>
#include <vector>

#include "cnslab/besov.hpp"
#include "cnslab/solver.hpp"
#include "cnslab/stats.hpp"

namespace cnslab {

// ---------------------------------------------------------------- generators

struct InitialDataSpec {
  std::string kind = "random_band";  // high_osc | low_reg_example | random_band | single_block
  double amplitude = 1e-3;
  double epsilon = 1.0 / 16.0;  // high_osc oscillation scale
  double envelope_M = 4.0;      // envelope frequency radius
  int J0 = 2;                   // low cutoff level, R = 2^{J0+1}
  double band_M = 6.0;          // random_band radius in units of 2pi/L
  int block = 0;                // single_block index
  int example = 1;              // low_reg_example: 1 or 2
  double example_N = 0;         // low_reg_example 2: oscillation frequency (0: Nyquist/4)
  unsigned seed = 1;
};

struct InitialData {
  SpectralField a0, u0, m0;
};

// Real field whose coefficients are Gaussian on |m| <= band (in units of
// 2pi/L), zero mean, scaled so that max|f| = amplitude (per field).
SpectralField random_band(const GridSpec& g, int comps, double band, double amplitude, unsigned seed);
// Delta_k of a random field, scaled to max|f| = amplitude.
SpectralField single_block(const GridSpec& g, int comps, int k, double amplitude, unsigned seed);
// Radial band-limited bump with transform supported in |xi| <= M, max value 1.
SpectralField bump_envelope(const GridSpec& g, double M);

InitialData gen_high_osc(const GridSpec& g, const InitialDataSpec& spec);
InitialData gen_low_reg_examples(const GridSpec& g, const InitialDataSpec& spec);
InitialData generate(const GridSpec& g, const InitialDataSpec& spec);

// ------------------------------------------------------------------ reports

struct Measurement {
  std::string name;
  double value = 0;
  double ci_low = 0, ci_high = 0;  // equal to value when no interval applies
};

struct CriterionCheck {
  int id = 0;  // acceptance criterion number
  std::string description;
  bool pass = false;
};

struct ExperimentReport {
  std::string name;
  std::string config;
  std::vector<Measurement> measured;
  std::vector<CriterionCheck> checks;
  double runtime_s = 0;

  void add(const std::string& n, double v) { measured.push_back({n, v, v, v}); }
  void add(const std::string& n, double v, double lo, double hi) { measured.push_back({n, v, lo, hi}); }
  void check(int id, const std::string& what, bool ok) { checks.push_back({id, what, ok}); }
  bool all_pass() const;
};

// Runs independent jobs on up to `threads` workers; results keep job order.
template <class T>
std::vector<T> run_jobs(const std::vector<std::function<T()>>& jobs, unsigned threads = 1) {
  std::vector<T> out;
  out.reserve(jobs.size());
  if (threads <= 1) {
    for (const auto& j : jobs) out.push_back(j());
    return out;
  }
  std::size_t next = 0;
  while (next < jobs.size()) {
    std::vector<std::future<T>> batch;
    for (unsigned w = 0; w < threads && next < jobs.size(); ++w, ++next) batch.push_back(std::async(std::launch::async, jobs[next]));
    for (auto& f : batch) out.push_back(f.get());
  }
  return out;
}

// ------------------------------------------------------ delta sweep (a priori)

struct SweepConfig {
  std::vector<IndexPair> pairs{{2, 4}, {3, 5}};
  std::vector<double> deltas{1e-3, 2e-3, 4e-3};
  double T = 1.0;
  double dt = 1e-3;
  int n = 64;
  double L = 2.0 * kPi;
  double band_M = 6.0;
  unsigned seed = 11;
  int sample_stride = 10;
  SolverParams sp;
};

struct DeltaRun {
  double delta = 0;
  SpectralField a0, u0;
  Trajectory nonlinear, linear;
};

std::vector<DeltaRun> run_delta_sweep(const SweepConfig& cfg);

struct AprioriRow {
  double delta = 0, X = 0, X0 = 0, X_lin = 0, ratio = 0;
};

struct AprioriResult {
  IndexPair pair;
  std::vector<AprioriRow> rows;
  LineFit correction_fit;  // log |X - X_lin| vs log X0
  double max_ratio = 0;
  bool low_monotone = true;  // low Besov norm nonincreasing for t >= t_mono
  double worst_low_increase = 0;  // largest relative increase seen
  ExperimentReport report;
};

// Low-frequency Besov norm ||(a,u)^l(t)||_{B^{-1+3/q}_{q,1}} at each sample.
std::vector<double> low_besov_series(const NormTracker& tr, const IndexPair& pair);

AprioriResult apriori_bound_experiment(const std::vector<DeltaRun>& runs, const IndexPair& pair, double t_mono = 0.1);

struct MomentumRow {
  double delta = 0, X = 0, Y = 0, ratio = 0, residual = 0;
};

struct MomentumResult {
  IndexPair pair;
  std::vector<MomentumRow> rows;
  LineFit residual_fit;  // log residual vs log X
  double max_ratio = 0;
  ExperimentReport report;
};

MomentumResult momentum_equivalence_experiment(const std::vector<DeltaRun>& runs, const IndexPair& pair);

// ------------------------------------------------------ high oscillation data

struct HighOscRow {
  double epsilon = 0, p = 0, high_norm = 0, low_norm = 0;
};

struct HighOscResult {
  std::vector<HighOscRow> rows;
  std::vector<std::pair<double, LineFit>> slopes;  // per p: log norm vs log eps
  double max_low = 0;
  double max_div = 0;
  ExperimentReport report;
};

HighOscResult high_osc_experiment(const std::vector<double>& eps_list = {1.0 / 16, 1.0 / 32, 1.0 / 64},
                                  const std::vector<double>& ps = {4, 5}, int n = 256, double M = 4.0, int J0 = 2);

// ------------------------------------------------------------ ratio probes

struct ProbeSweep {
  std::string name;
  std::vector<double> scales;      // dyadic rescaling factors
  std::vector<double> max_ratio;   // per scale, max over trials
  std::vector<std::vector<double>> ratios;  // [scale][trial]
  LineFit trend;                   // log2 max_ratio vs sweep step
  int trials = 0;
  int skipped = 0;
  std::vector<std::string> log;
  bool finite = true;
  bool nonincreasing = true;  // trend slope <= kTrendSlack
};

inline constexpr double kTrendSlack = 0.05;

void finalize_sweep(ProbeSweep& s);

// Scale j stretches the domain by 2^j (same samples), so the data moves to
// lower frequencies while k0 stays fixed; times scale by 4^j.
struct LowEstimateConfig {
  int d = 3;
  int n = 64;
  double L = 2.0 * kPi;
  int k0 = 1;             // absolute low/high split
  double band_M = 8.0;    // data band in units of 2pi/L
  double T = 4.0;         // horizon at scale 1 (scaled by 4^j)
  int time_samples = 24;
  double beta = 1.0;      // forcing decay rate at scale 1
  std::vector<int> dilations{0, 1, 2, 3};
  bool with_data = true, with_forcing = true;
  unsigned seed = 5;
  LameParams prm;
};

ProbeSweep low_estimate_probe(double q, double rho1, int trials, const LowEstimateConfig& cfg = {});
// All (q, rho1) combinations from one set of solutions, q-major order.
std::vector<ProbeSweep> low_estimate_sweeps(const std::vector<double>& qs, const std::vector<double>& rho1s, int trials,
                                            const LowEstimateConfig& cfg = {});

struct MaxRegConfig {
  int d = 3;
  int n = 32;
  double L = 2.0 * kPi;
  double p = 2;
  double s = 0.5;
  double band_M = 8.0;
  double T = 1.0;
  int time_samples = 48;
  double beta = 1.0;
  std::vector<int> dilations{0, 1, 2, 3};
  bool with_forcing = true;
  bool divergence_free = false;
  int single_block = -1000;  // >= k_min: data restricted to that block
  unsigned seed = 9;
  LameParams prm{1.0, 0.0, 1.0};
};

ProbeSweep maximal_regularity_probe(double rho1, int trials, const MaxRegConfig& cfg = {});
std::vector<ProbeSweep> maximal_regularity_sweeps(const std::vector<double>& rho1s, int trials, const MaxRegConfig& cfg = {});

struct BilinearConfig {
  int d = 3;
  int n = 64;
  double L = 2.0 * kPi;
  double band_M = 1.9;
  std::vector<int> scales{1, 2, 4, 8};
  unsigned seed = 3;
};

enum class BilinearKind { Paraproduct, Product, Composition };

struct ParaSample {
  double q = 2, p = 4, s = 1, m1 = 0.75, m2 = 0;
  bool remainder = false;
};
// Hypotheses of the nonclassical paraproduct / remainder estimate; reason
// holds the violated condition.
IndexCheck paraproduct_admissible(const ParaSample& smp, int d);

// paraproduct draws (s, m1, m2) admissibly per trial unless `fixed` is given.
ProbeSweep paraproduct_estimate_probe(BilinearKind kind, int trials, const BilinearConfig& cfg = {},
                                      const ParaSample* fixed = nullptr);

struct CommutatorConfig {
  BilinearConfig base;
  double q = 2, p = 4;
  double s = 0.5, sigma = 0.0;
  int k0 = 3;
};
ProbeSweep commutator_probe(int trials, const CommutatorConfig& cfg = {});

// ||grad Delta_k f||_{L^b} / (2^{k(1 + d(1/a - 1/b))} ||Delta_k f||_{L^a}), max over k and trials.
double bernstein_probe(const GridSpec& g, double a, double b, int trials, unsigned seed = 21);
// ||f||_{B^{sigma - d(1/p1 - 1/p2)}_{p2,1}} / ||f||_{B^sigma_{p1,1}}, max over trials.
double embedding_probe(const GridSpec& g, double sigma, double p1, double p2, int trials, unsigned seed = 23);

// -------------------------------------------------------------- continuity

struct ContinuityConfig {
  IndexPair pair{2, 4};
  double delta = 1e-2;
  std::vector<double> etas{1e-4, 1e-5, 1e-6};
  double T = 0.2;
  double dt = 2e-3;
  int n = 32;
  double L = 2.0 * kPi;
  std::string perturb = "full";  // full | low | high
  unsigned seed = 13;
};

struct ContinuityResult {
  std::vector<double> etas, distances;
  bool monotone = true;
  double min_factor = 0;  // min over halving-like steps of distance ratio
  ExperimentReport report;
};

ContinuityResult continuity_probe(const ContinuityConfig& cfg = {});

}  // namespace cnslab
