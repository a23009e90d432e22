#include <cmath>

#include "doctest.h"
#include "cnslab/besov.hpp"
#include "cnslab/probes.hpp"

using namespace cnslab;

TEST_CASE("symbols") {
  for (double rho : {0.3, 1.0, 3.0}) {
    CHECK(std::abs(h_symbol(rho) + eigenvalues(rho).lam_plus) < 1e-15);
    // Below the degenerate radius the real part is exactly rho^2/2.
    if (rho < 2) CHECK(htilde_symbol(rho).real() == doctest::Approx(rho * rho / 2).epsilon(1e-14));
  }
}

TEST_CASE("decay probe") {
  LowDecayConfig cfg;
  cfg.d = 2;
  cfg.p = 2;
  const LowDecayResult r2 = low_decay_probe(cfg);
  REQUIRE(r2.fits.size() == 1);
  CHECK(std::abs(r2.fits[0].fit.slope) <= 0.05);
  CHECK(r2.rows.size() == cfg.k_list.size());

  cfg.p = kInf;
  const LowDecayResult ri = low_decay_probe(cfg);
  CHECK(std::abs(ri.fits[0].fit.slope + 0.5) <= 0.1);

  cfg.tau_list = {1e4};
  CHECK_THROWS_WITH_AS(low_decay_probe(cfg), doctest::Contains("tau"), Error);
  CHECK(max_admissible_tau(cfg, -5) > 0);
}

TEST_CASE("wave growth probe") {
  // One dimension: no L^1 growth.
  WaveConfig w1;
  w1.d = 1;
  w1.n = 4096;
  w1.L = 400;
  w1.t_list = {0.25, 0.5, 1, 32, 45.25, 64, 90.5, 128};
  w1.fit_lo = 32;
  w1.fit_hi = 128;
  const WaveResult r1 = wave_growth_probe(w1);
  CHECK(std::abs(r1.fit.slope) <= 0.1);
  CHECK(r1.small_t_max_ratio <= 2.0);

  WaveConfig w2;
  w2.d = 2;
  w2.n = 256;
  w2.L = 96;
  const WaveResult r2 = wave_growth_probe(w2);
  CHECK(r2.small_t_max_ratio <= 2.0);
  CHECK(r2.fit.slope > 0.2);

  WaveConfig bad = w2;
  bad.t_list = {60};
  bad.fit_lo = 1, bad.fit_hi = 100;
  CHECK_THROWS_AS(wave_growth_probe(bad), Error);
}

TEST_CASE("scaling identity") {
  CHECK(scaling_identity_check(0, 2, 0.5) == 0.0);
  CHECK(scaling_identity_check(-2, 2, 0.5) <= 1e-8);
  CHECK(scaling_identity_check(-3, kInf, 0.5) <= 1e-8);
  CHECK(scaling_identity_check(-2, 1, 2.0) <= 1e-8);
  CHECK_THROWS_AS(scaling_identity_check(-9, 2, 0.5), Error);
}

TEST_CASE("parabolic bounds") {
  const RadialSymbol ht = [](double r) { return htilde_symbol(r); };
  const ParabolicResult r2 = parabolic_bound_probe(ht, {-4, -3, -2, -1, 0}, 2);
  CHECK(r2.max_upper <= 1.01);
  ParabolicConfig at0;
  at0.tau_list = {0.0};
  const ParabolicResult r0 = parabolic_bound_probe(ht, {0}, 1, at0);
  CHECK(r0.max_upper == doctest::Approx(1.0).epsilon(1e-12));
  const ParabolicResult r1 = parabolic_bound_probe(ht, {-4, -3, -2, -1, 0}, 1);
  CHECK(std::isfinite(r1.max_upper));
  CHECK(r1.min_lower > 0);
  CHECK(r1.variation <= 2.0);
}
