#include "cnslab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "cnslab/fft.hpp"
#include "cnslab/ops.hpp"

namespace cnslab {

void PressureLaw::validate() const {
  if (!(kappa > 1)) throw Error("pressure: kappa > 1 required");
  if (!(gamma > 0)) throw Error("pressure: gamma > 0 required");
}

double PressureLaw::P(double rho) const { return gamma * std::pow(rho, kappa) / kappa; }

double PressureLaw::G_prime(double a) const { return gamma * std::pow(1.0 + a, kappa - 2.0); }

double PressureLaw::k(double a) const { return G_prime(a) - gamma; }

double PressureLaw::G_times_a(double a) const {
  if (kappa == 2.0) return 0.5 * gamma * a * a;
  return gamma * ((std::pow(1.0 + a, kappa) - 1.0) / kappa - a);
}

const char* formulation_name(Formulation f) { return f == Formulation::Velocity ? "velocity" : "momentum"; }

void SolverParams::validate() const {
  lame.validate();
  pressure.validate();
  if (lame.pressure_slope != pressure.gamma) throw Error("solver: pressure_slope must equal P'(1)");
  if (!(vacuum_guard >= 0 && vacuum_guard < 1)) throw Error("solver: vacuum guard must lie in [0, 1)");
}

namespace {

std::string vacuum_message(double md, std::size_t loc) {
  std::ostringstream os;
  os << "vacuum guard violated: min density " << std::setprecision(17) << md << " at grid index " << loc;
  return os.str();
}

RealField pointwise(const RealField& a, const RealField& v, double (*fn)(double, double, double), double param) {
  // out_c(x) = fn(a(x), v_c(x), param)
  RealField out(v.grid, v.components);
  const std::size_t np = v.grid.points();
  for (int c = 0; c < v.components; ++c) {
    const double* av = a.comp(0);
    const double* vv = v.comp(c);
    double* o = out.comp(c);
    for (std::size_t i = 0; i < np; ++i) o[i] = fn(av[i], vv[i], param);
  }
  return out;
}

void add_into(SpectralField& acc, const SpectralField& x, double c) {
  for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += c * x.data[i];
}

SpectralField zero_scalar(const GridSpec& g) { return SpectralField(g, 1); }

}  // namespace

VacuumError::VacuumError(double md, std::size_t loc) : Error(vacuum_message(md, loc)), min_density(md), location(loc) {}

void check_vacuum(const RealField& a, double guard) {
  const double* p = a.comp(0);
  const std::size_t np = a.grid.points();
  std::size_t imin = 0;
  for (std::size_t i = 1; i < np; ++i)
    if (p[i] < p[imin]) imin = i;
  const double md = 1.0 + p[imin];
  if (!(md >= guard)) throw VacuumError(md, imin);
}

StateAM to_momentum(const StateUV& s, double guard) {
  check_vacuum(s.a, guard);
  StateAM out;
  out.t = s.t;
  out.a = s.a;
  out.m = pointwise(s.a, s.u, [](double a, double u, double) { return u + a * u; }, 0.0);
  return out;
}

StateUV to_velocity(const StateAM& s, double guard) {
  check_vacuum(s.a, guard);
  StateUV out;
  out.t = s.t;
  out.a = s.a;
  out.u = pointwise(s.a, s.m, [](double a, double m, double) { return m - PressureLaw::I(a) * m; }, 0.0);
  return out;
}

SpectralState to_spectral(const StateUV& s) { return {s.t, transform(s.a), transform(s.u)}; }
SpectralState to_spectral(const StateAM& s) { return {s.t, transform(s.a), transform(s.m)}; }
StateUV to_uv(const SpectralState& s) { return {s.t, inverse(s.a), inverse(s.u)}; }
StateAM to_am(const SpectralState& s) { return {s.t, inverse(s.a), inverse(s.u)}; }

std::pair<SpectralField, SpectralField> nonlinearity_uv(const SpectralState& s, const SolverParams& sp) {
  const GridSpec& g = s.a.grid;
  require_same_grid(g, s.u.grid, "nonlinearity_uv");
  const int d = g.d;
  const std::size_t np = g.points();
  const RealField a = inverse(s.a);
  check_vacuum(a, sp.vacuum_guard);
  const RealField u = inverse(s.u);

  RealField gp(g, d);  // accumulates g in physical space
  for (int j = 0; j < d; ++j) {
    const RealField dj = inverse(partial(s.u, j));
    const double* uj = u.comp(j);
    for (int i = 0; i < d; ++i) {
      const double* di = dj.comp(i);
      double* o = gp.comp(i);
      for (std::size_t x = 0; x < np; ++x) o[x] -= uj[x] * di[x];
    }
  }
  const RealField Au = inverse(lame(s.u, sp.lame.mu, sp.lame.lambda2));
  const double* av = a.comp(0);
  for (int i = 0; i < d; ++i) {
    const double* Ai = Au.comp(i);
    double* o = gp.comp(i);
    for (std::size_t x = 0; x < np; ++x) o[x] -= PressureLaw::I(av[x]) * Ai[x];
  }
  if (sp.pressure.kappa != 2.0) {
    const RealField ga = inverse(gradient(s.a));
    for (int i = 0; i < d; ++i) {
      const double* gi = ga.comp(i);
      double* o = gp.comp(i);
      for (std::size_t x = 0; x < np; ++x) o[x] -= sp.pressure.k(av[x]) * gi[x];
    }
  }
  const RealField au = pointwise(a, u, [](double aa, double uu, double) { return aa * uu; }, 0.0);
  SpectralField f = scaled(divergence(transform(au)), -1.0);
  SpectralField gs = transform(gp);
  if (sp.dealias) {
    dealias_inplace(f);
    dealias_inplace(gs);
  }
  return {std::move(f), std::move(gs)};
}

MomentumTerms momentum_terms(const SpectralState& s, const SolverParams& sp) {
  const GridSpec& g = s.a.grid;
  require_same_grid(g, s.u.grid, "momentum_terms");
  const int d = g.d;
  const std::size_t np = g.points(), nm = g.modes();
  const RealField a = inverse(s.a);
  check_vacuum(a, sp.vacuum_guard);
  const RealField m = inverse(s.u);
  const double* av = a.comp(0);

  MomentumTerms out;
  out.h1 = SpectralField(g, d);
  RealField T(g, 1);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      const double* mi = m.comp(i);
      const double* mj = m.comp(j);
      for (std::size_t x = 0; x < np; ++x) T.data[x] = mi[x] * mj[x] / (1.0 + av[x]);
      const SpectralField Th = transform(T);
      // h1_i -= d_j T_ij, h1_j -= d_i T_ij
      const SpectralField dj = partial(Th, j);
      for (std::size_t k = 0; k < nm; ++k) out.h1.comp(i)[k] -= dj.data[k];
      if (j != i) {
        const SpectralField di = partial(Th, i);
        for (std::size_t k = 0; k < nm; ++k) out.h1.comp(j)[k] -= di.data[k];
      }
    }
  const RealField Im = pointwise(a, m, [](double aa, double mm, double) { return PressureLaw::I(aa) * mm; }, 0.0);
  out.h2 = scaled(lame(transform(Im), sp.lame.mu, sp.lame.lambda2), -1.0);
  RealField Ga(g, 1);
  for (std::size_t x = 0; x < np; ++x) Ga.data[x] = sp.pressure.G_times_a(av[x]);
  out.h3 = scaled(gradient(transform(Ga)), -1.0);
  if (sp.dealias) {
    dealias_inplace(out.h1);
    dealias_inplace(out.h2);
    dealias_inplace(out.h3);
  }
  return out;
}

std::pair<SpectralField, SpectralField> nonlinearity_am(const SpectralState& s, const SolverParams& sp) {
  MomentumTerms t = momentum_terms(s, sp);
  add_into(t.h1, t.h2, 1.0);
  add_into(t.h1, t.h3, 1.0);
  return {zero_scalar(s.a.grid), std::move(t.h1)};
}

std::pair<SpectralField, SpectralField> nonlinearity(const SpectralState& s, const SolverParams& sp, Formulation f) {
  return f == Formulation::Velocity ? nonlinearity_uv(s, sp) : nonlinearity_am(s, sp);
}

double stability_cap(const GridSpec& g, const SolverParams& sp, double max_speed) {
  int mmax = g.n / 2 - 1;
  if (sp.dealias) {
    mmax = 0;
    while (3 * (mmax + 1) < g.n) ++mmax;
  }
  const double rho_max = g.dk() * mmax * std::sqrt(static_cast<double>(g.d));
  double cap = 2.0 / stiff_rate(rho_max, sp.lame);
  if (max_speed > 0) cap = std::min(cap, 0.5 * g.dx() / max_speed);
  return cap;
}

EtdStepper::EtdStepper(const GridSpec& g, double dt, const SolverParams& sp, Formulation f)
    : dt_(dt),
      sp_(sp),
      form_(f),
      E_(g, dt, sp.lame, PhiKind::Exp),
      P1_(g, dt, sp.lame, PhiKind::Phi1),
      P2_(g, dt, sp.lame, PhiKind::Phi2) {
  if (!(dt > 0)) throw Error("EtdStepper: dt must be positive");
  sp.validate();
}

SpectralState EtdStepper::step(const SpectralState& s) const {
  SpectralState out;
  out.t = s.t + dt_;
  E_.apply(s.a, s.u, out.a, out.u);
  if (sp_.linear_only) return out;
  const auto N0 = nonlinearity(s, sp_, form_);
  SpectralField ta, tu;
  P1_.apply(N0.first, N0.second, ta, tu);
  add_into(out.a, ta, dt_);
  add_into(out.u, tu, dt_);
  auto Ns = nonlinearity(out, sp_, form_);
  add_into(Ns.first, N0.first, -1.0);
  add_into(Ns.second, N0.second, -1.0);
  P2_.apply(Ns.first, Ns.second, ta, tu);
  add_into(out.a, ta, dt_);
  add_into(out.u, tu, dt_);
  return out;
}

std::vector<int> sample_schedule(int n_steps, int stride, bool dense_early) {
  if (stride < 1) throw Error("sample_schedule: stride must be >= 1");
  std::vector<int> s{0};
  int i = 0;
  while (i < n_steps) {
    int next = i + stride;
    if (dense_early) next = std::min(next, std::max(i + 1, static_cast<int>(std::ceil(1.05 * i))));
    i = std::min(next, n_steps);
    s.push_back(i);
  }
  return s;
}

Trajectory simulate(const SimConfig& cfg, const SpectralState& init) {
  cfg.sp.validate();
  if (!(cfg.dt > 0) || !(cfg.T > 0)) throw Error("simulate: dt and T must be positive");
  for (const auto& pr : cfg.track.pairs) {
    IndexCheck c = validate_index_pair(pr.q, pr.p);
    if (!c.accepted) throw Error("simulate: index pair rejected: " + c.reason);
  }
  const GridSpec g = init.a.grid;
  require_same_grid(g, init.u.grid, "simulate");
  const int steps = static_cast<int>(std::lround(cfg.T / cfg.dt));
  if (steps < 1 || std::abs(steps * cfg.dt - cfg.T) > 1e-9 * cfg.T) throw Error("simulate: T must be a multiple of dt");
  if (std::abs(init.a.data[0]) > 1e-12) throw Error("simulate: density perturbation must have zero mean");

  const DyadicPartition part = cfg.k0 ? DyadicPartition(g, *cfg.k0) : DyadicPartition(g);
  const BlockSampler sampler(part, cfg.track);
  Trajectory tr;
  tr.tracker = sampler.make_tracker();

  {
    const RealField a0 = inverse(init.a);
    check_vacuum(a0, cfg.sp.vacuum_guard);
    if (cfg.enforce_cap) {
      SpectralField u0 = init.u;
      if (cfg.form == Formulation::Momentum) u0 = transform(to_velocity(to_am(init), cfg.sp.vacuum_guard).u);
      const RealField up = inverse(u0);
      double vmax = 0;
      const std::size_t np = g.points();
      for (std::size_t x = 0; x < np; ++x) {
        double v2 = 0;
        for (int c = 0; c < g.d; ++c) v2 += up.comp(c)[x] * up.comp(c)[x];
        vmax = std::max(vmax, std::sqrt(v2));
      }
      const double cap = stability_cap(g, cfg.sp, vmax);
      if (cfg.dt > cap) {
        std::ostringstream os;
        os << "simulate: dt = " << cfg.dt << " exceeds the stability cap " << cap;
        throw Error(os.str());
      }
    }
  }

  const bool need_m = cfg.track.track_m;
  double initial_size = -1;
  auto sample = [&](const SpectralState& s) {
    const RealField a = inverse(s.a);
    DiagnosticsRow row;
    row.t = s.t;
    row.mass = s.a.data[0].real();
    row.min_density = 1.0 + *std::min_element(a.data.begin(), a.data.end());
    if (cfg.form == Formulation::Velocity) {
      if (need_m) {
        const RealField u = inverse(s.u);
        const SpectralField m = transform(to_momentum(StateUV{s.t, a, u}, 0.0).m);
        sampler.sample(tr.tracker, s.t, s.a, s.u, &m);
      } else {
        sampler.sample(tr.tracker, s.t, s.a, s.u, nullptr);
      }
    } else {
      const RealField m = inverse(s.u);
      const SpectralField u = transform(to_velocity(StateAM{s.t, a, m}, 0.0).u);
      sampler.sample(tr.tracker, s.t, s.a, u, &s.u);
    }
    tr.diagnostics.push_back(row);
    double size = 0;
    // Blow-up monitor: sum of the latest per-block norms of every series.
    for (const auto& name : {tracked::kAU, tracked::kA, tracked::kU, tracked::kM})
      for (Part pt : {Part::Low, Part::High})
        for (const auto& pr : cfg.track.pairs) {
          const double idx = pt == Part::Low ? pr.q : pr.p;
          if (!tr.tracker.has(name, pt, idx)) continue;
          const auto& ser = tr.tracker.series(name, pt, idx);
          for (double v : ser.back()) size += v;
        }
    if (initial_size < 0) initial_size = size;
    if (initial_size > 0 && size > cfg.blowup_factor * initial_size) {
      tr.failed = true;
      tr.failure = "blow-up: tracked norms exceed " + std::to_string(cfg.blowup_factor) + " x initial at t = " +
                   std::to_string(s.t);
    }
  };

  const std::vector<int> sched = sample_schedule(steps, std::max(1, cfg.sample_stride), cfg.dense_early);
  std::size_t next_sample = 0;
  SpectralState cur = init;
  std::vector<cplx> mom0(g.d);
  for (int c = 0; c < g.d; ++c) mom0[c] = cur.u.comp(c)[0];
  if (sched[next_sample] == 0) {
    sample(cur);
    ++next_sample;
  }
  if (cfg.snapshot_stride > 0) tr.snapshots.push_back(cur);

  const EtdStepper stepper(g, cfg.dt, cfg.sp, cfg.form);
  for (int i = 0; i < steps && !tr.failed; ++i) {
    SpectralState next;
    try {
      next = stepper.step(cur);
      require_finite(next.a, "simulate");
      require_finite(next.u, "simulate");
    } catch (const VacuumError& e) {
      tr.failed = true;
      tr.failure = e.what();
      break;
    } catch (const Error& e) {
      tr.failed = true;
      tr.failure = std::string("non-finite state: ") + e.what();
      break;
    }
    // Exact step count times dt avoids accumulated rounding in t.
    next.t = init.t + (i + 1) * cfg.dt;
    tr.max_mass_drift_per_step = std::max(tr.max_mass_drift_per_step, std::abs(next.a.data[0] - cur.a.data[0]));
    if (cfg.form == Formulation::Momentum)
      for (int c = 0; c < g.d; ++c)
        tr.momentum_drift = std::max(tr.momentum_drift, std::abs(next.u.comp(c)[0] - mom0[c]) * g.volume());
    cur = std::move(next);
    tr.steps = i + 1;
    if (next_sample < sched.size() && sched[next_sample] == i + 1) {
      sample(cur);
      ++next_sample;
    }
    if (cfg.snapshot_stride > 0 && (i + 1) % cfg.snapshot_stride == 0) tr.snapshots.push_back(cur);
  }
  tr.final_state = cur;

  // Running hybrid components up to each sample time.
  const IndexPair& pr = cfg.track.pairs.front();
  for (std::size_t j = 0; j < tr.diagnostics.size(); ++j) {
    auto& row = tr.diagnostics[j];
    if (j == 0) {
      const int kmin = tr.tracker.k_min();
      row.X_low_inf = besov_sum(tr.tracker.series(tracked::kAU, Part::Low, pr.q)[0], kmin, -1 + 3 / pr.q, 1);
      row.a_high_inf = besov_sum(tr.tracker.series(tracked::kA, Part::High, pr.p)[0], kmin, 3 / pr.p, 1);
      row.u_high_inf = besov_sum(tr.tracker.series(tracked::kU, Part::High, pr.p)[0], kmin, -1 + 3 / pr.p, 1);
      continue;
    }
    const HybridComponents hc = hybrid_X_components(tr.tracker.truncated(row.t), pr);
    row.X_low_inf = hc.low_inf;
    row.X_low_2 = hc.low_2;
    row.X_low_1 = hc.low_1;
    row.a_high_inf = hc.a_high_inf;
    row.a_high_1 = hc.a_high_1;
    row.u_high_inf = hc.u_high_inf;
    row.u_high_1 = hc.u_high_1;
  }
  return tr;
}

SpectralField effective_velocity(const SpectralState& s) {
  SpectralField w = gradient(inverse_neg_laplacian(s.a));
  add_into(w, leray_project(s.u, Projector::Q), 1.0);
  return w;
}

double effective_velocity_residual(const SpectralState& prev, const SpectralState& mid, const SpectralState& next,
                                   double h, const SolverParams& sp) {
  if (!(h > 0)) throw Error("effective_velocity_residual: spacing must be positive");
  const SpectralField w = effective_velocity(mid);
  SpectralField dw = effective_velocity(next);
  add_into(dw, effective_velocity(prev), -1.0);
  dw = scaled(dw, 0.5 / h);
  const auto [f, gg] = nonlinearity_uv(mid, sp);
  // B x = grad(-Lap)^{-1} x
  auto B = [](const SpectralField& x) { return gradient(inverse_neg_laplacian(x)); };
  SpectralField r = dw;
  add_into(r, laplacian(w), -1.0);
  SpectralField src = f;
  add_into(src, divergence(gg), -1.0);
  add_into(r, B(src), -1.0);
  add_into(r, w, -1.0);
  add_into(r, B(mid.a), 1.0);
  // Terms that vanish for nu = gamma = 1.
  const double nu = sp.lame.nu(), gam = sp.lame.pressure_slope;
  if (nu != 1.0) add_into(r, laplacian(leray_project(mid.u, Projector::Q)), -(nu - 1.0));
  if (gam != 1.0) add_into(r, gradient(mid.a), -(1.0 - gam));
  auto l2 = [](const SpectralField& x) {
    double e = 0;
    for (int c = 0; c < x.components; ++c) e += spectral_energy(x, c);
    return std::sqrt(e);
  };
  const double scale = std::max(l2(w), l2(dw));
  return scale > 0 ? l2(r) / scale : 0.0;
}

}  // namespace cnslab
