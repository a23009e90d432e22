#include <cmath>
#include <random>

#include "doctest.h"
#include "cnslab/besov.hpp"
#include "cnslab/experiments.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/ops.hpp"
#include "cnslab/probes.hpp"

using namespace cnslab;

namespace {

RealField cosine(const GridSpec& g, int m, double amp) {
  RealField f(g, 1);
  const std::size_t np = g.points(), stride = np / g.n;
  for (std::size_t i = 0; i < np; ++i) f.data[i] = amp * std::cos(m * g.dk() * (i / stride) * g.dx());
  return f;
}

// Plateau-localized packet of block k centred at x = c (one-dimensional grid).
SpectralField packet(const GridSpec& g, int k, double c) {
  SpectralField sf(g, 1);
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    sf.data[i] = plateau_window(std::ldexp(md.rho, -k)) * std::exp(cplx(0, -md.xi[0] * c));
  });
  return sf;
}

}  // namespace

TEST_CASE("L^p quadrature") {
  const GridSpec g{3, 32, 3.0};
  const RealField f = cosine(g, 2, 1.7);
  const double vol = std::pow(3.0, 3);
  // mean cos^2 = 1/2, mean cos^4 = 3/8, exact on the grid below the aliasing limit.
  CHECK(lp_norm(f, 2) == doctest::Approx(1.7 * std::sqrt(vol / 2)).epsilon(1e-13));
  CHECK(lp_norm(f, 4) == doctest::Approx(1.7 * std::pow(3.0 / 8.0 * vol, 0.25)).epsilon(1e-13));
  CHECK(lp_norm(f, kInf) == doctest::Approx(1.7).epsilon(1e-14));
}

TEST_CASE("single-mode Besov norm") {
  const GridSpec g{3, 64, 2 * kPi * 2};  // dk = 1/2
  const DyadicPartition part(g);
  // |xi| = 1.5 * 2^1 = 3, m = 6.
  const RealField f = cosine(g, 6, 0.8);
  const SpectralField sf = transform(f);
  for (double p : {2.0, 4.0, kInf}) {
    const double s = 0.7;
    CHECK(besov_norm(sf, {s, p, 1}, part) == doctest::Approx(std::pow(2.0, s) * lp_norm(f, p)).epsilon(1e-12));
  }
}

TEST_CASE("Besov norm properties on random fields") {
  const GridSpec g{3, 32, 2 * kPi};
  const DyadicPartition part(g);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    const SpectralField f = random_band(g, 1, 14, 1.0, seed), h = random_band(g, 1, 14, 1.0, seed + 100);
    const BesovIndex idx{0.4, 3, 1};
    const double nf = besov_norm(f, idx, part);
    CHECK(besov_norm(scaled(f, -2.5), idx, part) == doctest::Approx(2.5 * nf).epsilon(1e-12));
    CHECK(besov_norm(add(f, h), idx, part) <= nf + besov_norm(h, idx, part) + 1e-10);
    double prev = kInf;
    for (double r : {1.0, 2.0, 4.0, kInf}) {
      const double v = besov_norm(f, {0.0, 4, r}, part);
      CHECK(v <= prev * (1 + 1e-14));
      prev = v;
    }
  }
  CHECK(besov_norm(SpectralField(g, 1), {1, 2, 1}, part) == 0.0);
  SpectralField bad = random_band(g, 1, 4, 1.0, 1);
  bad.data[5] = cplx(std::nan(""), 0);
  CHECK_THROWS_AS(besov_norm(bad, {0, 2, 1}, part), Error);
}

TEST_CASE("embedding ratio is bounded") {
  const GridSpec g{3, 32, 2 * kPi};
  const double r = embedding_probe(g, 0.5, 2, 4, 6);
  CHECK(std::isfinite(r));
  CHECK(r > 0.01);
  CHECK(r < 10.0);
}

TEST_CASE("index pair validation") {
  CHECK(validate_index_pair(2, 4).accepted);
  CHECK(validate_index_pair(3, 5).accepted);
  const IndexCheck r = validate_index_pair(3, 6);
  CHECK_FALSE(r.accepted);
  CHECK(r.reason.find("p < 6") != std::string::npos);
  CHECK_FALSE(validate_index_pair(2, 5).accepted);  // p <= 2q
  CHECK_FALSE(validate_index_pair(4, 3).accepted);
  CHECK_FALSE(validate_index_pair(1.5, 2).accepted);
}

TEST_CASE("Hardy norm") {
  const GridSpec g{1, 2048, 400.0};
  const DyadicPartition part(g);
  const SpectralField f1 = packet(g, 0, 100.0), f2 = packet(g, 2, 300.0);
  const double l1a = lp_norm(inverse(f1), 1), l1b = lp_norm(inverse(f2), 1);
  CHECK(hardy_norm(f1, part) == doctest::Approx(l1a).epsilon(1e-12));
  const double h = hardy_norm(add(f1, f2), part);
  CHECK(std::abs(h / (l1a + l1b) - 1.0) < 0.05);
  CHECK(hardy_norm(SpectralField(g, 1), part) == 0.0);
}

TEST_CASE("Chemin-Lerner norms") {
  const GridSpec g{3, 32, 2 * kPi};
  const DyadicPartition part(g);
  const SpectralField f = random_band(g, 1, 12, 1.0, 3);
  const BesovIndex idx{0.5, 2, 1};
  const std::vector<double> bn = block_norms(f, part, 2);

  NormTracker c(part.k_min(), part.k_max(), part.k0());
  for (int i = 0; i <= 10; ++i) {
    c.add_sample(0.1 * i);
    c.record("f", Part::Full, 2, bn);
  }
  CHECK(chemin_lerner_norm(c, "f", Part::Full, idx, 1) == doctest::Approx(besov_norm(f, idx, part)).epsilon(1e-12));

  // Monotone decay: the sup is attained at t = 0.
  NormTracker dec(part.k_min(), part.k_max(), part.k0());
  for (int i = 0; i <= 10; ++i) {
    dec.add_sample(0.1 * i);
    std::vector<double> v = bn;
    for (auto& x : v) x *= std::exp(-0.1 * i);
    dec.record("f", Part::Full, 2, v);
  }
  CHECK(chemin_lerner_norm(dec, "f", Part::Full, idx, kInf) == doctest::Approx(besov_norm(f, idx, part)).epsilon(1e-14));

  // Minkowski ordering on random trajectories.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    NormTracker tr(part.k_min(), part.k_max(), part.k0());
    for (int i = 0; i < 12; ++i) {
      tr.add_sample(0.05 * i + 0.01 * u(rng));
      std::vector<double> v(bn.size());
      for (auto& x : v) x = u(rng);
      tr.record("f", Part::Full, 2, v);
    }
    CHECK(standard_time_space_norm(tr, "f", Part::Full, idx, 2) <= chemin_lerner_norm(tr, "f", Part::Full, idx, 2) + 1e-12);
  }

  NormTracker one(part.k_min(), part.k_max(), part.k0());
  one.add_sample(0);
  one.record("f", Part::Full, 2, bn);
  CHECK_THROWS_AS(chemin_lerner_norm(one, "f", Part::Full, idx, 1), Error);
  NormTracker back(part.k_min(), part.k_max(), part.k0());
  back.add_sample(1.0);
  CHECK_THROWS_AS(back.add_sample(0.5), Error);
}

TEST_CASE("hybrid norms on an exponentially decaying low block") {
  const GridSpec g{3, 32, 2 * kPi};
  const DyadicPartition part(g, 2);
  const SpectralField a0 = single_block(g, 1, 0, 0.1, 9);
  const IndexPair pair{2, 4};
  const BlockSampler sampler(part, TrackRequest{{pair}, true, true});
  NormTracker tr = sampler.make_tracker();
  const SpectralField zero_u(g, 3);
  const double T = 2.0;
  const int steps = 200;
  for (int i = 0; i <= steps; ++i) {
    const double t = T * i / steps;
    sampler.sample(tr, t, scaled(a0, std::exp(-t)), zero_u, &zero_u);
  }
  const HybridComponents h = hybrid_X_components(tr, pair);
  const double q = pair.q;
  const double b1 = besov_norm(a0, {-1 + 3 / q, q, 1}, part);
  const double b2 = besov_norm(a0, {-1 + 5 / q, q, 1}, part);
  const double b3 = besov_norm(a0, {5 / q, q, 1}, part);
  CHECK(h.low_inf == doctest::Approx(b1).epsilon(0.01));
  CHECK(h.low_2 == doctest::Approx(b2 * std::sqrt((1 - std::exp(-2 * T)) / 2)).epsilon(0.01));
  CHECK(h.low_1 == doctest::Approx(b3 * (1 - std::exp(-T))).epsilon(0.01));
  CHECK(h.a_high_inf < 1e-12 * b1);
  CHECK(h.u_high_inf == 0.0);

  NormTracker z = sampler.make_tracker();
  for (int i = 0; i <= 2; ++i) sampler.sample(z, i * 0.5, SpectralField(g, 1), zero_u, &zero_u);
  CHECK(hybrid_X_norm(z, pair) == 0.0);
  CHECK(hybrid_Y_norm(z, pair) == 0.0);
  CHECK_THROWS_AS(hybrid_X_norm(z, {3, 6}), Error);
}

TEST_CASE("oscillating data has no low-frequency part") {
  const GridSpec g{3, 64, 2 * kPi};
  InitialDataSpec spec;
  spec.kind = "high_osc";
  spec.amplitude = 0.1;
  spec.epsilon = 1.0 / 16;
  spec.envelope_M = 4;
  spec.J0 = 2;
  const InitialData d = gen_high_osc(g, spec);
  const DyadicPartition part(g, spec.J0 + 1);
  for (const IndexPair& pair : {IndexPair{2, 4}, IndexPair{3, 5}}) {
    const X0Parts x = X0_parts(d.a0, d.u0, nullptr, pair, part);
    CHECK(x.low == 0.0);
    CHECK(x.a_high == 0.0);
    CHECK(x.u_high > 0.0);
  }
  // X0 is absolutely homogeneous when a0 = 0.
  const IndexPair pair{2, 4};
  const double x1 = X0_norm(d.a0, d.u0, nullptr, pair, part);
  CHECK(X0_norm(d.a0, scaled(d.u0, 3.0), nullptr, pair, part) == doctest::Approx(3 * x1).epsilon(1e-12));
}
