#include <cmath>

#include "doctest.h"
#include "cnslab/experiments.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/ops.hpp"
#include "cnslab/solver.hpp"
#include "cnslab/stats.hpp"

using namespace cnslab;

namespace {

const GridSpec kGrid{3, 32, 2 * kPi};

double max_diff(const SpectralField& a, const SpectralField& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) e = std::max(e, std::abs(a.data[i] - b.data[i]));
  return e;
}

double max_diff(const RealField& a, const RealField& b) {
  double e = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) e = std::max(e, std::abs(a.data[i] - b.data[i]));
  return e;
}

SpectralState small_state(const GridSpec& g, double amp, double band, unsigned seed) {
  SpectralState s = zero_state(g);
  s.a = random_band(g, 1, band, amp, seed);
  s.u = random_band(g, g.d, band, amp, seed + 1);
  return s;
}

// u . grad u, spectrally.
SpectralField advection(const SpectralField& u) {
  const GridSpec& g = u.grid;
  const RealField up = inverse(u);
  RealField out(g, g.d);
  for (int j = 0; j < g.d; ++j) {
    const RealField du = inverse(partial(u, j));
    for (int c = 0; c < g.d; ++c)
      for (std::size_t i = 0; i < g.points(); ++i) out.comp(c)[i] += up.comp(j)[i] * du.comp(c)[i];
  }
  return transform(out);
}

SpectralField times(const RealField& s, const SpectralField& v) {
  RealField vp = inverse(v);
  for (int c = 0; c < vp.components; ++c)
    for (std::size_t i = 0; i < s.size(); ++i) vp.comp(c)[i] *= s.data[i];
  return transform(vp);
}

}  // namespace

TEST_CASE("pressure law") {
  for (double kappa : {1.4, 2.0, 3.0}) {
    const PressureLaw P{kappa, 1.0};
    const double h = 1e-5;
    CHECK((P.P(1 + h) - P.P(1 - h)) / (2 * h) == doctest::Approx(1.0).epsilon(1e-9));
    for (double a : {-0.5, -0.1, 0.0, 0.3, 1.2}) {
      CHECK(P.G_prime(a) == doctest::Approx(std::pow(1 + a, kappa - 2)).epsilon(1e-14));
      CHECK(P.k(a) == doctest::Approx(std::pow(1 + a, kappa - 2) - 1).scale(1).epsilon(1e-14));
      CHECK(P.G_times_a(a) == doctest::Approx((std::pow(1 + a, kappa) - 1) / kappa - a).scale(1).epsilon(1e-14));
    }
  }
  CHECK_THROWS_AS((PressureLaw{1.0, 1.0}.validate()), Error);
}

TEST_CASE("velocity-form nonlinearity") {
  SolverParams sp;
  SpectralState s = small_state(kGrid, 0.05, 5, 3);

  SpectralState nou = s;
  nou.u = SpectralField(kGrid, 3);
  auto [f0, g0] = nonlinearity_uv(nou, sp);
  CHECK(max_abs(f0) == 0.0);
  // Only the pressure correction survives: g = -k(a) grad a.
  sp.dealias = false;
  auto [f0n, g0n] = nonlinearity_uv(nou, sp);
  RealField ka = inverse(nou.a);
  for (auto& v : ka.data) v = -sp.pressure.k(v);
  CHECK(max_diff(g0n, times(ka, gradient(nou.a))) < 1e-12);

  SpectralState noa = s;
  noa.a = SpectralField(kGrid, 1);
  auto [f1, g1] = nonlinearity_uv(noa, sp);
  CHECK(max_abs(f1) == 0.0);
  CHECK(max_diff(g1, scaled(advection(noa.u), -1.0)) < 1e-13);

  // Two modes: a = A cos x, u = (B cos 2y, 0, 0); f = -d_x(a u_1) = A B sin x cos 2y.
  const double A = 0.2, B = 0.3;
  RealField ap(kGrid, 1), upv(kGrid, 3), fex(kGrid, 1);
  const std::size_t n = kGrid.n;
  for (std::size_t i = 0; i < kGrid.points(); ++i) {
    const double x = static_cast<double>(i / (n * n)) * kGrid.dx(), y = static_cast<double>((i / n) % n) * kGrid.dx();
    ap.data[i] = A * std::cos(x);
    upv.comp(0)[i] = B * std::cos(2 * y);
    fex.data[i] = A * B * std::sin(x) * std::cos(2 * y);
  }
  SpectralState two = zero_state(kGrid);
  two.a = transform(ap);
  two.u = transform(upv);
  sp.dealias = true;
  auto [f2, g2] = nonlinearity_uv(two, sp);
  CHECK(max_diff(inverse(f2), fex) < 1e-10);
  CHECK(std::abs(f2.data[0]) < 1e-15);

  SpectralState vac = s;
  for (auto& v : ap.data) v *= 0.95 / A;  // 1 + a dips to 0.05
  vac.a = transform(ap);
  try {
    nonlinearity_uv(vac, sp);
    FAIL("vacuum not detected");
  } catch (const VacuumError& e) {
    CHECK(e.min_density < 0.1);
    CHECK(e.location < kGrid.points());
  }
}

TEST_CASE("momentum-form nonlinearity") {
  SolverParams sp;
  sp.dealias = false;
  const SpectralState base = small_state(kGrid, 0.05, 5, 9);

  SpectralState nom = base;
  nom.u = SpectralField(kGrid, 3);
  const MomentumTerms t0 = momentum_terms(nom, sp);
  CHECK(max_abs(t0.h1) == 0.0);
  CHECK(max_abs(t0.h2) == 0.0);
  RealField Ga = inverse(nom.a);
  for (auto& v : Ga.data) v = sp.pressure.G_times_a(v);
  CHECK(max_diff(t0.h3, scaled(gradient(transform(Ga)), -1.0)) < 1e-13);
  // h3 is curl-free and h1, h3 have zero mean.
  CHECK(max_abs(curl3(t0.h3)) < 1e-13);

  SpectralState noa = base;
  noa.a = SpectralField(kGrid, 1);
  const MomentumTerms t1 = momentum_terms(noa, sp);
  CHECK(max_abs(t1.h2) == 0.0);
  CHECK(max_abs(t1.h3) == 0.0);
  // div(m (x) m) = (m . grad) m + (div m) m.
  const SpectralField divmm = add(advection(noa.u), times(inverse(divergence(noa.u)), noa.u));
  CHECK(max_diff(t1.h1, scaled(divmm, -1.0)) < 1e-13);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(t1.h1.data[c * kGrid.modes()]) < 1e-15);

  // Consistency with the velocity form: with m = (1+a) u,
  // h = a_t u + (1+a) u_t - A m + grad a, where a_t = -div m and
  // u_t = A u - grad a + g.
  const SpectralState uv = small_state(kGrid, 0.02, 2.5, 17);
  StateUV su = to_uv(uv);
  const StateAM sm = to_momentum(su);
  const SpectralState am = to_spectral(sm);
  const auto [f, g] = nonlinearity_uv(uv, sp);
  const auto [z, h] = nonlinearity_am(am, sp);
  CHECK(max_abs(z) == 0.0);
  const LameParams& L = sp.lame;
  const SpectralField ut = add(add(lame(uv.u, L.mu, L.lambda2), gradient(uv.a), -1.0), g);
  const SpectralField at = scaled(divergence(am.u), -1.0);
  RealField onepa = inverse(uv.a);
  for (auto& v : onepa.data) v += 1.0;
  SpectralField expect = add(times(inverse(at), uv.u), times(onepa, ut));
  expect = add(expect, lame(am.u, L.mu, L.lambda2), -1.0);
  expect = add(expect, gradient(am.a));
  CHECK(max_diff(h, expect) <= 1e-8 * max_abs(h) + 1e-14);
}

TEST_CASE("state conversions") {
  const SpectralState s = small_state(kGrid, 0.2, 6, 21);
  const StateUV su = to_uv(s);
  const StateAM sm = to_momentum(su);
  const StateUV back = to_velocity(sm);
  CHECK(max_diff(back.u, su.u) <= 1e-12 * max_abs(su.u));
  CHECK(max_diff(back.a, su.a) == 0.0);
  StateUV z = su;
  for (auto& v : z.a.data) v = 0;
  CHECK(max_diff(to_momentum(z).m, z.u) == 0.0);
  StateUV vac = su;
  vac.a.data[7] = -0.95;
  CHECK_THROWS_AS(to_momentum(vac), VacuumError);

  // Low-frequency m and u are comparable for small data.
  const SpectralState s2 = small_state(kGrid, 1e-2, 6, 23);
  const SpectralState m2 = to_spectral(to_momentum(to_uv(s2)));
  const DyadicPartition part(kGrid);
  for (double q : {2.0, 3.0}) {
    const auto [mu_lo, mu_hi] = split_low_high(m2.u, part);
    const auto [uu_lo, uu_hi] = split_low_high(s2.u, part);
    const double r = besov_norm(mu_lo, {-1 + 3 / q, q, 1}, part) / besov_norm(uu_lo, {-1 + 3 / q, q, 1}, part);
    CHECK(r >= 0.5);
    CHECK(r <= 2.0);
  }
}

TEST_CASE("ETD stepper") {
  SolverParams sp;
  sp.linear_only = true;
  const SpectralState s = small_state(kGrid, 0.1, 8, 31);
  const double dt = 1e-2;
  for (Formulation f : {Formulation::Velocity, Formulation::Momentum}) {
    const EtdStepper st(kGrid, dt, sp, f);
    const SpectralState one = st.step(s), ref = apply_green(s, dt);
    CHECK(max_diff(one.a, ref.a) <= 1e-14);
    CHECK(max_diff(one.u, ref.u) <= 1e-14);
  }
  CHECK_THROWS_AS(EtdStepper(kGrid, 0.0, sp, Formulation::Velocity), Error);
  const double cap = stability_cap(kGrid, sp, 1.0);
  CHECK(cap > 0);
  CHECK(cap <= 0.5 * kGrid.dx() + 1e-15);
}

TEST_CASE("temporal order of the nonlinear stepper") {
  const GridSpec g{2, 32, 2 * kPi};
  SolverParams sp;
  const SpectralState s = small_state(g, 0.1, 4, 41);
  auto run = [&](int steps) {
    const double T = 0.2;
    const EtdStepper st(g, T / steps, sp, Formulation::Velocity);
    SpectralState x = s;
    for (int i = 0; i < steps; ++i) x = st.step(x);
    return x;
  };
  const SpectralState r1 = run(25), r2 = run(50), r3 = run(100);
  const double e1 = max_diff(r1.u, r2.u) + max_diff(r1.a, r2.a), e2 = max_diff(r2.u, r3.u) + max_diff(r2.a, r3.a);
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.9);
  CHECK(order <= 2.1);
}

TEST_CASE("simulation invariants") {
  SimConfig cfg;
  cfg.dt = 2e-3;
  cfg.T = 0.2;
  cfg.sample_stride = 20;

  const Trajectory zero = simulate(cfg, zero_state(kGrid));
  REQUIRE_FALSE(zero.failed);
  CHECK(max_abs(zero.final_state.a) == 0.0);
  CHECK(max_abs(zero.final_state.u) == 0.0);
  for (const auto& row : zero.diagnostics) {
    CHECK(row.X_low_inf == 0.0);
    CHECK(row.u_high_1 == 0.0);
    CHECK(row.min_density == 1.0);
  }

  const SpectralState s = small_state(kGrid, 1e-3, 6, 51);
  for (Formulation f : {Formulation::Velocity, Formulation::Momentum}) {
    cfg.form = f;
    const SpectralState init = f == Formulation::Velocity ? s : to_spectral(to_momentum(to_uv(s)));
    const Trajectory tr = simulate(cfg, init);
    REQUIRE_FALSE(tr.failed);
    CHECK(tr.max_mass_drift_per_step <= 1e-12);
    if (f == Formulation::Momentum) CHECK(tr.momentum_drift / cfg.T <= 1e-11);
    CHECK(tr.tracker.samples() == tr.diagnostics.size());
  }

  SimConfig bad = cfg;
  bad.dt = 0.5;
  bad.T = 1.0;
  CHECK_THROWS_AS(simulate(bad, s), Error);
  bad = cfg;
  bad.track.pairs = {IndexPair{3, 6}};
  CHECK_THROWS_AS(simulate(bad, s), Error);
  SpectralState nonzero_mean = s;
  nonzero_mean.a.data[0] = 1e-3;
  CHECK_THROWS_AS(simulate(cfg, nonzero_mean), Error);
}

TEST_CASE("sample schedule") {
  const auto s = sample_schedule(100, 10, false);
  CHECK(s.front() == 0);
  CHECK(s.back() == 100);
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(s[i] > s[i - 1]);
    CHECK(s[i] - s[i - 1] <= 10);
  }
  const auto d = sample_schedule(1000, 50, true);
  CHECK(d.size() > 1000 / 50 + 1);
  CHECK(d[1] == 1);
}

TEST_CASE("effective velocity") {
  SpectralState s = zero_state(kGrid);
  s.u = random_band(kGrid, 3, 6, 1.0, 61);
  CHECK(max_diff(effective_velocity(s), leray_project(s.u, Projector::Q)) < 1e-15);

  // u = grad phi and a = Lap phi cancel exactly.
  SpectralField phi = random_band(kGrid, 1, 6, 1.0, 62);
  s.u = gradient(phi);
  s.a = laplacian(phi);
  CHECK(max_abs(effective_velocity(s)) < 1e-12 * max_abs(s.u));

  // On a single high mode the slow eigen-component of w nearly cancels, so w
  // decays at the fast (heat-like) rate, about -|xi|^2.
  RealField ap(kGrid, 1), up(kGrid, 3);
  const std::size_t n = kGrid.n;
  for (std::size_t i = 0; i < kGrid.points(); ++i) {
    const double x = static_cast<double>(i / (n * n)) * kGrid.dx();
    ap.data[i] = 0.1 * std::cos(12 * x);
    up.comp(0)[i] = 0.1 * std::sin(12 * x);
  }
  SpectralState hs = zero_state(kGrid);
  hs.a = transform(ap);
  hs.u = transform(up);
  std::vector<double> ts, ls;
  for (double t : {0.0, 0.005, 0.01, 0.015, 0.02}) {
    ts.push_back(t);
    ls.push_back(std::log(max_abs(effective_velocity(apply_green(hs, t)))));
  }
  CHECK(fit_line(ts, ls).slope == doctest::Approx(-144.0).epsilon(0.2));
}
