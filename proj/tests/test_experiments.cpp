#include <cmath>

#include "doctest.h"
#include "cnslab/experiments.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/ops.hpp"

using namespace cnslab;

namespace {

// Same samples on a torus shrunk by lambda: f(lambda x) on the original grid.
SpectralField shrink(const SpectralField& f, const GridSpec& g, double factor) {
  SpectralField out(g, f.components);
  out.data = f.data;
  for (auto& z : out.data) z *= factor;
  return out;
}

}  // namespace

TEST_CASE("oscillating data generator") {
  const GridSpec g{3, 64, 2 * kPi};
  InitialDataSpec spec;
  spec.kind = "high_osc";
  spec.amplitude = 0.1;
  spec.epsilon = 1.0 / 16;
  spec.envelope_M = 4;
  spec.J0 = 2;
  const InitialData d = generate(g, spec);
  CHECK(max_abs(d.a0) == 0.0);
  CHECK(max_abs(divergence(d.u0)) <= 1e-12 * max_abs(d.u0) * 16);
  const DyadicPartition part(g, spec.J0 + 1);
  const auto bn = block_norms(d.u0, part, 2);
  for (int j = part.k_min(); j <= spec.J0; ++j) CHECK(bn[j - part.k_min()] == 0.0);
  CHECK(bn[spec.J0 + 2 - part.k_min()] > 0.0);
  spec.epsilon = 1.0 / 40;  // 1/eps + M above the Nyquist radius 32
  CHECK_THROWS_AS(generate(g, spec), Error);
}

TEST_CASE("example data") {
  const GridSpec g{3, 64, 2 * kPi};
  const DyadicPartition part(g);
  InitialDataSpec spec;
  spec.kind = "low_reg_example";
  spec.amplitude = 1e-2;
  spec.example = 1;
  const InitialData e1 = generate(g, spec);
  CHECK(max_abs(e1.a0) == 0.0);
  for (std::size_t i = 0; i < e1.u0.data.size(); ++i) CHECK(e1.u0.data[i] == e1.m0.data[i]);
  spec.example = 2;
  const InitialData e2 = generate(g, spec);
  auto [lo, hi] = split_low_high(e2.u0, part);
  CHECK(max_abs(lo) == 0.0);
  CHECK(max_abs(e2.a0) > 0.0);
  CHECK(std::abs(e2.a0.data[0]) < 1e-15);
  for (const InitialData* d : {&e1, &e2}) {
    const double x0 = X0_norm(d->a0, d->u0, &d->m0, {2, 4}, part);
    CHECK(std::isfinite(x0));
    CHECK(x0 > 0.0);
  }
  spec.example_N = 40;
  CHECK_THROWS_AS(generate(g, spec), Error);
}

TEST_CASE("X0 is invariant under the scaling transform") {
  // (a0, u0) -> (a0(2x), 2 u0(2x)): same samples on a torus half as long.
  const GridSpec g{3, 32, 4 * kPi}, gs{3, 32, 2 * kPi};
  const DyadicPartition part(g), parts(gs, part.k0() + 1);
  const SpectralField a0(g, 1);
  const SpectralField u0 = random_band(g, 3, 10, 0.1, 4);
  const IndexPair pair{2, 4};
  const X0Parts x = X0_parts(a0, u0, nullptr, pair, part);
  const X0Parts y = X0_parts(shrink(a0, gs, 1.0), shrink(u0, gs, 2.0), nullptr, pair, parts);
  CHECK(y.low == doctest::Approx(x.low).epsilon(1e-8));
  CHECK(y.u_high == doctest::Approx(x.u_high).epsilon(1e-8));
  // The high-frequency density part is invariant for every q.
  const SpectralField a1 = random_band(g, 1, 10, 0.1, 5);
  const X0Parts xa = X0_parts(a1, u0, nullptr, {3, 5}, part);
  const X0Parts ya = X0_parts(shrink(a1, gs, 1.0), shrink(u0, gs, 2.0), nullptr, {3, 5}, parts);
  CHECK(ya.a_high == doctest::Approx(xa.a_high).epsilon(1e-8));
}

TEST_CASE("zero-amplitude sweep gives zero functionals") {
  SweepConfig cfg;
  cfg.n = 32;
  cfg.T = 0.02;
  cfg.dt = 1e-3;
  cfg.deltas = {0.0};
  const auto runs = run_delta_sweep(cfg);
  REQUIRE(runs.size() == 1);
  for (const IndexPair& pr : cfg.pairs) {
    CHECK(hybrid_X_norm(runs[0].nonlinear.tracker, pr) == 0.0);
    CHECK(hybrid_Y_norm(runs[0].nonlinear.tracker, pr) == 0.0);
  }
}

TEST_CASE("momentum functional equals the velocity functional when a stays zero") {
  const GridSpec g{3, 32, 2 * kPi};
  SimConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 0.05;
  cfg.sp.linear_only = true;
  cfg.sample_stride = 5;
  SpectralState s = zero_state(g);
  s.u = leray_project(random_band(g, 3, 6, 1e-3, 8), Projector::P);
  const Trajectory tr = simulate(cfg, s);
  REQUIRE_FALSE(tr.failed);
  CHECK(max_abs(tr.final_state.a) < 1e-18);  // projector roundoff only
  const IndexPair pair{2, 4};
  const YComponents y = hybrid_Y_components(tr.tracker, pair);
  const HybridComponents x = hybrid_X_components(tr.tracker, pair);
  CHECK(y.low() == doctest::Approx(u_low_functional(tr.tracker, pair)).epsilon(1e-14));
  CHECK(y.high_inf == doctest::Approx(x.u_high_inf).epsilon(1e-14));
}

TEST_CASE("low-frequency linear estimate") {
  LowEstimateConfig cfg;
  cfg.dilations = {0, 1};
  cfg.with_forcing = false;
  const ProbeSweep data_only = low_estimate_probe(2, kInf, 3, cfg);
  CHECK(data_only.finite);
  for (double r : data_only.max_ratio) CHECK(r <= 1.5);

  cfg.with_forcing = true;
  cfg.with_data = false;
  const ProbeSweep forcing_only = low_estimate_probe(2, 1, 3, cfg);
  CHECK(forcing_only.finite);
  for (double r : forcing_only.max_ratio) CHECK(r > 0);

  cfg.with_data = true;
  const auto both = low_estimate_sweeps({2, 4}, {1}, 3, cfg);
  REQUIRE(both.size() == 2);
  CHECK(both[0].finite);
  CHECK(both[1].finite);
}

TEST_CASE("maximal regularity of the Lame heat flow") {
  MaxRegConfig cfg;
  cfg.dilations = {0, 1};
  cfg.with_forcing = false;
  cfg.single_block = 1;
  const ProbeSweep one = maximal_regularity_probe(kInf, 3, cfg);
  for (double r : one.max_ratio) CHECK(r <= 1.2);
  cfg.divergence_free = true;
  const ProbeSweep sol = maximal_regularity_probe(1, 3, cfg);
  for (double r : sol.max_ratio) CHECK(r <= 1.2);
  cfg = MaxRegConfig{};
  cfg.dilations = {0, 1};
  const ProbeSweep rnd = maximal_regularity_probe(1, 5, cfg);
  CHECK(rnd.finite);
}

TEST_CASE("paraproduct hypotheses") {
  ParaSample s;
  s.q = 2, s.p = 4, s.m1 = 0, s.m2 = 0, s.s = 1;
  const IndexCheck bad = paraproduct_admissible(s, 3);
  CHECK_FALSE(bad.accepted);
  CHECK(bad.reason.find("m1") != std::string::npos);
  s.m1 = 0.75;
  CHECK(paraproduct_admissible(s, 3).accepted);
  s.p = 5;
  CHECK_FALSE(paraproduct_admissible(s, 3).accepted);  // p <= 2q

  BilinearConfig cfg;
  cfg.n = 32;
  cfg.scales = {1, 2};
  ParaSample zero;
  zero.m1 = 0;
  const ProbeSweep skipped = paraproduct_estimate_probe(BilinearKind::Paraproduct, 3, cfg, &zero);
  CHECK(skipped.skipped == 3);
  CHECK_FALSE(skipped.log.empty());
  ParaSample ok;
  const ProbeSweep run = paraproduct_estimate_probe(BilinearKind::Paraproduct, 3, cfg, &ok);
  CHECK(run.skipped == 0);
  CHECK(run.finite);
  const ProbeSweep comp = paraproduct_estimate_probe(BilinearKind::Composition, 3, cfg);
  CHECK(comp.finite);
}

TEST_CASE("commutator probe") {
  CommutatorConfig cfg;
  cfg.base.n = 32;
  cfg.base.scales = {1, 2};
  cfg.k0 = 2;
  const ProbeSweep s = commutator_probe(3, cfg);
  CHECK(s.finite);
  CHECK(s.max_ratio.size() == 2);
}

TEST_CASE("trend bookkeeping") {
  ProbeSweep s;
  s.scales = {1, 2, 4, 8};
  s.ratios = {{1.0, 2.0}, {1.5, 1.9}, {1.2, 1.1}, {0.9, 1.0}};
  s.trials = 2;
  finalize_sweep(s);
  CHECK(s.max_ratio == std::vector<double>{2.0, 1.9, 1.2, 1.0});
  CHECK(s.nonincreasing);
  CHECK(s.finite);
  s.ratios[3] = {1.0, std::nan("")};
  finalize_sweep(s);
  CHECK_FALSE(s.finite);
  s.ratios = {{1.0}, {2.0}, {4.0}, {8.0}};
  finalize_sweep(s);
  CHECK_FALSE(s.nonincreasing);
  // Shrinking sweeps are judged in sweep order, not by the scale value.
  s.scales = {1, 0.5, 0.25, 0.125};
  s.ratios = {{1.0}, {0.5}, {0.25}, {0.125}};
  finalize_sweep(s);
  CHECK(s.nonincreasing);
  CHECK(s.trend.slope == doctest::Approx(-1.0));
  s.ratios = {{0.125}, {0.25}, {0.5}, {1.0}};
  finalize_sweep(s);
  CHECK_FALSE(s.nonincreasing);
}

TEST_CASE("continuity of the solution map") {
  ContinuityConfig cfg;
  cfg.etas = {0.0};
  CHECK(continuity_probe(cfg).distances[0] == 0.0);
  for (const char* which : {"full", "low", "high"}) {
    cfg.perturb = which;
    cfg.etas = {1e-4, 1e-5, 1e-6};
    const ContinuityResult r = continuity_probe(cfg);
    CHECK(r.monotone);
    CHECK(r.min_factor >= 1.5);
    CHECK(r.distances.back() < 1e-5);
  }
}
