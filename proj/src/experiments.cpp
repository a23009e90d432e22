#include "cnslab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "cnslab/bony.hpp"
#include "cnslab/dyadic.hpp"
#include "cnslab/fft.hpp"
#include "cnslab/ops.hpp"

namespace cnslab {

namespace {

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

void scale_inplace(SpectralField& f, double c) {
  for (auto& v : f.data) v *= c;
}

double bump_profile(double r) {
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

// f(lambda x) on the same torus: coefficient m moves to lambda m.
SpectralField dilate_torus(const SpectralField& f, int lambda) {
  if (lambda < 1) throw Error("dilate_torus: factor must be a positive integer");
  if (lambda == 1) return f;
  const GridSpec& g = f.grid;
  SpectralField out(g, f.components);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    bool any = false;
    for (int c = 0; c < f.components; ++c) any = any || f.comp(c)[i] != cplx(0.0);
    if (!any) return;
    std::array<int, 3> t{0, 0, 0};
    for (int a = 0; a < g.d; ++a) {
      t[a] = lambda * md.m[a];
      if (2 * std::abs(t[a]) >= g.n) throw Error("dilate_torus: dilated spectrum leaves the grid");
    }
    const std::size_t j = mode_index(g, t);
    if (j == npos) throw Error("dilate_torus: target mode not stored");
    for (int c = 0; c < f.components; ++c) out.data[c * nm + j] = f.data[c * nm + i];
  });
  return out;
}

// Same samples on a dilated domain.
SpectralField relabel(const SpectralField& f, const GridSpec& g) {
  SpectralField out = f;
  out.grid = g;
  return out;
}

std::vector<double> time_grid(double T, int samples) {
  if (samples < 3) throw Error("time_grid: need at least 3 samples");
  std::vector<double> t{0.0};
  const double t1 = T * 1e-3;
  for (int i = 0; i < samples - 1; ++i) t.push_back(t1 * std::pow(T / t1, static_cast<double>(i) / (samples - 2)));
  t.back() = T;
  return t;
}

std::vector<double> trapezoid(const std::vector<double>& t) {
  std::vector<double> w(t.size(), 0.0);
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double h = t[i + 1] - t[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

// sum_k 2^{k s} (int a_k(t)^rho dt)^{1/rho}; series[time][block].
double cl_from_series(const std::vector<std::vector<double>>& series, const std::vector<double>& w, int kmin, double s,
                      double rho) {
  const std::size_t nb = series.front().size();
  std::vector<double> per(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    if (std::isinf(rho)) {
      for (const auto& row : series) per[b] = std::max(per[b], row[b]);
    } else {
      double acc = 0;
      for (std::size_t i = 0; i < series.size(); ++i) acc += w[i] * std::pow(series[i][b], rho);
      per[b] = std::pow(acc, 1.0 / rho);
    }
  }
  return besov_sum(per, kmin, s, 1.0);
}

SpectralField multiply(const SpectralField& f, const SpectralField& g) {
  return transform(pointwise_product(inverse(f), inverse(g)));
}

double linf(const SpectralField& f) { return max_abs(inverse(f)); }

double besov(const SpectralField& f, double s, double p, const DyadicPartition& part) {
  return besov_norm(f, BesovIndex{s, p, 1.0}, part);
}

std::string describe_grid(const GridSpec& g) { return g.describe(); }

}  // namespace

// ------------------------------------------------------------- generators

SpectralField random_band(const GridSpec& g, int comps, double band, double amplitude, unsigned seed) {
  g.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  RealField f(g, comps);
  for (auto& v : f.data) v = nd(rng);
  SpectralField s = transform(f);
  const std::size_t nm = g.modes();
  const double dk = g.dk();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    if (i == 0 || md.rho > band * dk * (1 + 1e-12) || md.nyquist_any)
      for (int c = 0; c < comps; ++c) s.data[c * nm + i] = 0.0;
  });
  const double mx = max_abs(inverse(s));
  if (mx == 0) throw Error("random_band: band contains no modes");
  scale_inplace(s, amplitude / mx);
  return s;
}

SpectralField single_block(const GridSpec& g, int comps, int k, double amplitude, unsigned seed) {
  const DyadicPartition part(g);
  SpectralField s = random_band(g, comps, g.n, 1.0, seed);
  s = lp_block(s, part, k);
  const double mx = max_abs(inverse(s));
  if (mx == 0) throw Error("single_block: block is empty on this grid");
  scale_inplace(s, amplitude / mx);
  return s;
}

SpectralField bump_envelope(const GridSpec& g, double M) {
  if (!(M > 0)) throw Error("bump_envelope: radius must be positive");
  SpectralField s(g, 1);
  for_each_mode(g, [&](std::size_t i, const Mode& md) { s.data[i] = bump_profile(md.rho / M); });
  const double mx = max_abs(inverse(s));
  scale_inplace(s, 1.0 / mx);
  return s;
}

namespace {

// phi(x) cos(N x_3) assembled in frequency space, so coefficients outside
// the shifted supports are exact zeros.
SpectralField oscillating_envelope(const GridSpec& g, double M, double N) {
  const double dk = g.dk();
  const double steps = N / dk;
  if (std::abs(steps - std::round(steps)) > 1e-9) throw Error("oscillation frequency is not a grid frequency");
  if (N + M >= g.nyquist()) throw Error("oscillation frequency beyond Nyquist");
  SpectralField s(g, 1);
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    double rp = 0, rm = 0;
    for (int a = 0; a < g.d; ++a) {
      const double x = md.xi[a];
      const double sh = (a == g.d - 1) ? N : 0.0;
      rp += (x - sh) * (x - sh);
      rm += (x + sh) * (x + sh);
    }
    s.data[i] = 0.5 * (bump_profile(std::sqrt(rp) / M) + bump_profile(std::sqrt(rm) / M));
  });
  // Normalize by the envelope maximum; a scalar factor keeps zeros exact.
  SpectralField env(g, 1);
  for_each_mode(g, [&](std::size_t i, const Mode& md) { env.data[i] = bump_profile(md.rho / M); });
  const double emax = max_abs(inverse(env));
  scale_inplace(s, 1.0 / emax);
  return s;
}

SpectralField perp_gradient(const SpectralField& phi) {
  // (d_2 phi, -d_1 phi, 0)
  const GridSpec& g = phi.grid;
  SpectralField u(g, 3);
  const SpectralField d1 = partial(phi, 1), d0 = partial(phi, 0);
  const std::size_t nm = g.modes();
  for (std::size_t i = 0; i < nm; ++i) {
    u.data[i] = d1.data[i];
    u.data[nm + i] = -d0.data[i];
  }
  return u;
}

SpectralField momentum_of(const SpectralField& a, const SpectralField& u) {
  const RealField ap = inverse(a), up = inverse(u);
  return transform(to_momentum(StateUV{0, ap, up}, 0.0).m);
}

}  // namespace

InitialData gen_high_osc(const GridSpec& g, const InitialDataSpec& spec) {
  if (g.d != 3) throw Error("gen_high_osc: d = 3 required");
  if (!(spec.epsilon > 0)) throw Error("gen_high_osc: epsilon must be positive");
  const double N = 1.0 / spec.epsilon;
  if (N >= g.nyquist()) throw Error("gen_high_osc: 1/epsilon beyond Nyquist");
  InitialData d;
  const SpectralField phi = oscillating_envelope(g, spec.envelope_M, N);
  d.u0 = perp_gradient(phi);
  scale_inplace(d.u0, spec.amplitude);
  d.a0 = SpectralField(g, 1);
  d.m0 = d.u0;
  return d;
}

InitialData gen_low_reg_examples(const GridSpec& g, const InitialDataSpec& spec) {
  if (g.d != 3) throw Error("gen_low_reg_examples: d = 3 required");
  InitialData d;
  if (spec.example == 1) {
    d.a0 = SpectralField(g, 1);
    d.u0 = random_band(g, 3, spec.band_M, spec.amplitude, spec.seed);
    d.m0 = d.u0;
    return d;
  }
  if (spec.example != 2) throw Error("gen_low_reg_examples: example must be 1 or 2");
  const double N = spec.example_N > 0 ? spec.example_N : g.nyquist() / 4;
  if (N + spec.envelope_M >= g.nyquist()) throw Error("gen_low_reg_examples: N beyond Nyquist");
  d.a0 = bump_envelope(g, spec.envelope_M);
  d.a0.data[0] = 0.0;  // zero-mean density perturbation
  scale_inplace(d.a0, spec.amplitude / max_abs(inverse(d.a0)));
  d.u0 = perp_gradient(oscillating_envelope(g, spec.envelope_M, N));
  scale_inplace(d.u0, spec.amplitude);
  d.m0 = momentum_of(d.a0, d.u0);
  return d;
}

InitialData generate(const GridSpec& g, const InitialDataSpec& spec) {
  if (spec.kind == "high_osc") return gen_high_osc(g, spec);
  if (spec.kind == "low_reg_example") return gen_low_reg_examples(g, spec);
  InitialData d;
  if (spec.kind == "random_band") {
    d.a0 = random_band(g, 1, spec.band_M, spec.amplitude, spec.seed);
    d.u0 = random_band(g, g.d, spec.band_M, spec.amplitude, spec.seed + 1);
  } else if (spec.kind == "single_block") {
    d.a0 = single_block(g, 1, spec.block, spec.amplitude, spec.seed);
    d.u0 = single_block(g, g.d, spec.block, spec.amplitude, spec.seed + 1);
  } else {
    throw Error("unknown initial data kind: " + spec.kind);
  }
  d.m0 = momentum_of(d.a0, d.u0);
  return d;
}

bool ExperimentReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CriterionCheck& c) { return c.pass; });
}

// ------------------------------------------------------------ delta sweep

std::vector<DeltaRun> run_delta_sweep(const SweepConfig& cfg) {
  const GridSpec g{3, cfg.n, cfg.L};
  g.validate();
  // One shape per field; amplitudes scale it exactly.
  const SpectralField a_shape = random_band(g, 1, cfg.band_M, 1.0, cfg.seed);
  const SpectralField u_shape = random_band(g, 3, cfg.band_M, 1.0, cfg.seed + 1);
  std::vector<DeltaRun> runs;
  for (double delta : cfg.deltas) {
    DeltaRun r;
    r.delta = delta;
    r.a0 = scaled(a_shape, delta);
    r.u0 = scaled(u_shape, delta);
    SimConfig sc;
    sc.dt = cfg.dt;
    sc.T = cfg.T;
    sc.sp = cfg.sp;
    sc.track.pairs = cfg.pairs;
    sc.track.track_m = true;
    sc.sample_stride = cfg.sample_stride;
    const SpectralState s0{0.0, r.a0, r.u0};
    r.nonlinear = simulate(sc, s0);
    if (r.nonlinear.failed) throw Error("delta sweep: run failed: " + r.nonlinear.failure);
    sc.sp.linear_only = true;
    r.linear = simulate(sc, s0);
    runs.push_back(std::move(r));
  }
  return runs;
}

std::vector<double> low_besov_series(const NormTracker& tr, const IndexPair& pair) {
  const auto& s = tr.series(tracked::kAU, Part::Low, pair.q);
  std::vector<double> out;
  for (const auto& row : s) out.push_back(besov_sum(row, tr.k_min(), -1 + 3 / pair.q, 1.0));
  return out;
}

AprioriResult apriori_bound_experiment(const std::vector<DeltaRun>& runs, const IndexPair& pair, double t_mono) {
  const auto t0 = Clock::now();
  if (runs.empty()) throw Error("apriori_bound_experiment: no runs");
  AprioriResult res;
  res.pair = pair;
  std::vector<double> lx, ly;
  for (const auto& r : runs) {
    const DyadicPartition part(r.a0.grid, r.nonlinear.tracker.k0());
    AprioriRow row;
    row.delta = r.delta;
    row.X = hybrid_X_norm(r.nonlinear.tracker, pair);
    row.X_lin = hybrid_X_norm(r.linear.tracker, pair);
    row.X0 = X0_norm(r.a0, r.u0, nullptr, pair, part);
    row.ratio = row.X0 > 0 ? row.X / row.X0 : 0.0;
    res.max_ratio = std::max(res.max_ratio, row.ratio);
    res.rows.push_back(row);
    const double corr = std::abs(row.X - row.X_lin);
    if (corr > 0 && row.X0 > 0) {
      lx.push_back(std::log(row.X0));
      ly.push_back(std::log(corr));
    }
    const auto series = low_besov_series(r.nonlinear.tracker, pair);
    const auto& times = r.nonlinear.tracker.times();
    for (std::size_t i = 1; i < series.size(); ++i) {
      if (times[i - 1] < t_mono) continue;
      const double inc = (series[i] - series[i - 1]) / series[i - 1];
      res.worst_low_increase = std::max(res.worst_low_increase, inc);
      if (inc > 1e-12) res.low_monotone = false;
    }
  }
  if (lx.size() >= 2) res.correction_fit = fit_line(lx, ly);
  auto& rep = res.report;
  std::ostringstream cfg;
  cfg << "q=" << pair.q << " p=" << pair.p << " deltas=" << runs.size();
  rep.name = "apriori_bound";
  rep.config = cfg.str();
  for (const auto& row : res.rows) {
    rep.add("X/X0 delta=" + std::to_string(row.delta), row.ratio);
  }
  rep.add("correction exponent", res.correction_fit.slope, res.correction_fit.ci_low, res.correction_fit.ci_high);
  rep.add("worst low-frequency increase", res.worst_low_increase);
  rep.check(7, "X/X0 <= 10 for all runs", res.max_ratio <= 10.0);
  rep.check(7, "quadratic correction exponent 2 +- 0.3", lx.size() >= 2 && std::abs(res.correction_fit.slope - 2.0) <= 0.3);
  rep.check(7, "low-frequency Besov norm nonincreasing for t >= 0.1", res.low_monotone);
  rep.runtime_s = seconds_since(t0);
  return res;
}

MomentumResult momentum_equivalence_experiment(const std::vector<DeltaRun>& runs, const IndexPair& pair) {
  const auto t0 = Clock::now();
  MomentumResult res;
  res.pair = pair;
  std::vector<double> lx, ly;
  for (const auto& r : runs) {
    MomentumRow row;
    row.delta = r.delta;
    row.X = hybrid_X_norm(r.nonlinear.tracker, pair);
    const YComponents y = hybrid_Y_components(r.nonlinear.tracker, pair);
    row.Y = y.total();
    row.ratio = row.X > 0 ? row.Y / row.X : 0.0;
    row.residual = std::abs(u_low_functional(r.nonlinear.tracker, pair) - y.low());
    res.max_ratio = std::max(res.max_ratio, row.ratio);
    if (row.residual > 0 && row.X > 0) {
      lx.push_back(std::log(row.X));
      ly.push_back(std::log(row.residual));
    }
    res.rows.push_back(row);
  }
  if (lx.size() >= 2) res.residual_fit = fit_line(lx, ly);
  auto& rep = res.report;
  rep.name = "momentum_equivalence";
  std::ostringstream cfg;
  cfg << "q=" << pair.q << " p=" << pair.p;
  rep.config = cfg.str();
  for (const auto& row : res.rows) rep.add("Y/X delta=" + std::to_string(row.delta), row.ratio);
  rep.add("residual exponent", res.residual_fit.slope, res.residual_fit.ci_low, res.residual_fit.ci_high);
  rep.check(8, "Y/X <= 5", res.max_ratio <= 5.0);
  rep.check(8, "residual exponent >= 1.7", lx.size() >= 2 && res.residual_fit.slope >= 1.7);
  rep.runtime_s = seconds_since(t0);
  return res;
}

// ---------------------------------------------------------- high oscillation

HighOscResult high_osc_experiment(const std::vector<double>& eps_list, const std::vector<double>& ps, int n, double M,
                                  int J0) {
  const auto t0 = Clock::now();
  const GridSpec g{3, n, 2.0 * kPi};
  const DyadicPartition part(g, J0 + 1);
  HighOscResult res;
  std::vector<std::vector<double>> lx(ps.size()), ly(ps.size());
  for (double eps : eps_list) {
    InitialDataSpec spec;
    spec.kind = "high_osc";
    spec.epsilon = eps;
    spec.envelope_M = M;
    spec.J0 = J0;
    spec.amplitude = 1.0;
    const InitialData d = gen_high_osc(g, spec);
    res.max_div = std::max(res.max_div, max_abs(divergence(d.u0)) / std::max(1e-300, max_abs(d.u0)));
    const auto low = joint_block_norms({&d.u0}, part, ps, Part::Low);
    const auto high = joint_block_norms({&d.u0}, part, ps, Part::High);
    for (std::size_t j = 0; j < ps.size(); ++j) {
      HighOscRow row;
      row.epsilon = eps;
      row.p = ps[j];
      row.low_norm = *std::max_element(low[j].begin(), low[j].end());
      row.high_norm = besov_sum(high[j], part.k_min(), -1 + 3 / ps[j], 1.0);
      res.max_low = std::max(res.max_low, row.low_norm);
      lx[j].push_back(std::log(eps));
      ly[j].push_back(std::log(row.high_norm));
      res.rows.push_back(row);
    }
  }
  auto& rep = res.report;
  rep.name = "high_osc";
  rep.config = describe_grid(g) + " M=" + std::to_string(M) + " J0=" + std::to_string(J0);
  rep.add("max low-frequency block norm", res.max_low);
  rep.check(9, "low-frequency block norms exactly 0", res.max_low == 0.0);
  for (std::size_t j = 0; j < ps.size(); ++j) {
    const LineFit f = fit_line(lx[j], ly[j]);
    res.slopes.push_back({ps[j], f});
    const double target = 1.0 - 3.0 / ps[j];
    rep.add("slope p=" + std::to_string(ps[j]), f.slope, f.ci_low, f.ci_high);
    rep.check(9, "high-frequency slope 1-3/p +- 0.1 at p=" + std::to_string(ps[j]), std::abs(f.slope - target) <= 0.1);
  }
  rep.runtime_s = seconds_since(t0);
  return res;
}

// ----------------------------------------------------------------- probes

void finalize_sweep(ProbeSweep& s) {
  s.max_ratio.assign(s.scales.size(), 0.0);
  s.finite = true;
  for (std::size_t i = 0; i < s.scales.size(); ++i)
    for (double r : s.ratios[i]) {
      if (!std::isfinite(r)) s.finite = false;
      s.max_ratio[i] = std::max(s.max_ratio[i], r);
    }
  if (s.scales.size() >= 2 && s.finite) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.scales.size(); ++i) {
      if (!(s.max_ratio[i] > 0)) continue;
      x.push_back(static_cast<double>(i));  // one dyadic step per entry, in sweep order
      y.push_back(std::log2(s.max_ratio[i]));
    }
    if (x.size() >= 2) s.trend = fit_line(x, y);
  }
  s.nonincreasing = s.finite && s.trend.slope <= kTrendSlack;
}

namespace {

std::vector<ProbeSweep> make_sweeps(const std::string& base, const std::vector<std::string>& labels, int trials,
                                    const std::vector<int>& dilations) {
  std::vector<ProbeSweep> out;
  for (const auto& l : labels) {
    ProbeSweep sw;
    sw.name = base + " " + l;
    sw.trials = trials;
    for (int j : dilations) sw.scales.push_back(std::ldexp(1.0, -j));
    sw.ratios.assign(sw.scales.size(), {});
    out.push_back(std::move(sw));
  }
  return out;
}

std::string fmt_index(const char* name, double v) {
  std::ostringstream os;
  os << name << "=" << v;
  return os.str();
}

}  // namespace

std::vector<ProbeSweep> low_estimate_sweeps(const std::vector<double>& qs, const std::vector<double>& rho1s, int trials,
                                            const LowEstimateConfig& cfg) {
  if (trials < 1) throw Error("low_estimate_probe: trials must be positive");
  if (qs.empty() || rho1s.empty()) throw Error("low_estimate_probe: empty index list");
  cfg.prm.validate();
  std::vector<std::string> labels;
  for (double q : qs)
    for (double r : rho1s) labels.push_back(fmt_index("q", q) + " " + fmt_index("rho1", r));
  auto sweeps = make_sweeps("low_estimate", labels, trials, cfg.dilations);
  const GridSpec g0{cfg.d, cfg.n, cfg.L};
  for (int tr = 0; tr < trials; ++tr) {
    const unsigned seed = cfg.seed + 97u * tr;
    const SpectralField za = random_band(g0, 1, cfg.band_M, 1.0, seed);
    const SpectralField zu = random_band(g0, cfg.d, cfg.band_M, 1.0, seed + 1);
    const SpectralField fa = random_band(g0, 1, cfg.band_M, 1.0, seed + 2);
    const SpectralField fu = random_band(g0, cfg.d, cfg.band_M, 1.0, seed + 3);
    for (std::size_t jd = 0; jd < cfg.dilations.size(); ++jd) {
      const int j = cfg.dilations[jd];
      const GridSpec g{cfg.d, cfg.n, std::ldexp(cfg.L, j)};
      const DyadicPartition part(g, cfg.k0);
      const double T = std::ldexp(cfg.T, 2 * j), beta = std::ldexp(cfg.beta, -2 * j);
      SpectralField a0 = relabel(za, g), u0 = relabel(zu, g), f0 = relabel(fa, g), g0f = relabel(fu, g);
      if (!cfg.with_data) {
        scale_inplace(a0, 0.0);
        scale_inplace(u0, 0.0);
      }
      if (!cfg.with_forcing) {
        scale_inplace(f0, 0.0);
        scale_inplace(g0f, 0.0);
      }
      const auto times = time_grid(T, cfg.time_samples);
      const auto w = trapezoid(times);
      // series[q][time][block]
      std::vector<std::vector<std::vector<double>>> series(qs.size());
      for (double t : times) {
        SpectralState z;
        ModeTable(g, t, cfg.prm, PhiKind::Exp).apply(a0, u0, z.a, z.u);
        if (t > 0 && cfg.with_forcing) {
          SpectralField da, du;
          ModeTable(g, t, cfg.prm, PhiKind::Phi1, beta).apply(f0, g0f, da, du);
          const double c = t * std::exp(-beta * t);
          for (std::size_t i = 0; i < z.a.data.size(); ++i) z.a.data[i] += c * da.data[i];
          for (std::size_t i = 0; i < z.u.data.size(); ++i) z.u.data[i] += c * du.data[i];
        }
        const auto nrm = joint_block_norms({&z.a, &z.u}, part, qs, Part::Low);
        for (std::size_t iq = 0; iq < qs.size(); ++iq) series[iq].push_back(nrm[iq]);
      }
      const auto dn = joint_block_norms({&a0, &u0}, part, qs, Part::Low);
      const auto fn = joint_block_norms({&f0, &g0f}, part, qs, Part::Low);
      const double fint = (1.0 - std::exp(-beta * T)) / beta;
      for (std::size_t iq = 0; iq < qs.size(); ++iq) {
        const double q = qs[iq], s = -1.0 + 3.0 / q;
        const double rhs = besov_sum(dn[iq], part.k_min(), s, 1.0) + besov_sum(fn[iq], part.k_min(), s, 1.0) * fint;
        for (std::size_t ir = 0; ir < rho1s.size(); ++ir) {
          const double rho1 = rho1s[ir];
          const double gain = std::abs(1.0 - 2.0 / q) + (std::isinf(rho1) ? 0.0 : 2.0 / rho1);
          const double lhs = cl_from_series(series[iq], w, part.k_min(), s + gain, rho1);
          sweeps[iq * rho1s.size() + ir].ratios[jd].push_back(rhs > 0 ? lhs / rhs : (lhs > 0 ? kInf : 0.0));
        }
      }
    }
  }
  for (auto& sw : sweeps) finalize_sweep(sw);
  return sweeps;
}

ProbeSweep low_estimate_probe(double q, double rho1, int trials, const LowEstimateConfig& cfg) {
  return low_estimate_sweeps({q}, {rho1}, trials, cfg).front();
}

std::vector<ProbeSweep> maximal_regularity_sweeps(const std::vector<double>& rho1s, int trials, const MaxRegConfig& cfg) {
  if (trials < 1) throw Error("maximal_regularity_probe: trials must be positive");
  if (rho1s.empty()) throw Error("maximal_regularity_probe: empty index list");
  cfg.prm.validate();
  std::vector<std::string> labels;
  for (double r : rho1s) labels.push_back(fmt_index("p", cfg.p) + " " + fmt_index("rho1", r));
  auto sweeps = make_sweeps("maximal_regularity", labels, trials, cfg.dilations);
  const double mu = cfg.prm.mu, nu = cfg.prm.nu();
  const GridSpec g0{cfg.d, cfg.n, cfg.L};
  for (int tr = 0; tr < trials; ++tr) {
    const unsigned seed = cfg.seed + 131u * tr;
    SpectralField bu = cfg.single_block >= DyadicPartition(g0).k_min()
                           ? single_block(g0, cfg.d, cfg.single_block, 1.0, seed)
                           : random_band(g0, cfg.d, cfg.band_M, 1.0, seed);
    SpectralField bf = random_band(g0, cfg.d, cfg.band_M, 1.0, seed + 1);
    if (cfg.divergence_free) {
      bu = leray_project(bu, Projector::P);
      bf = leray_project(bf, Projector::P);
    }
    if (!cfg.with_forcing) scale_inplace(bf, 0.0);
    for (std::size_t jd = 0; jd < cfg.dilations.size(); ++jd) {
      const int j = cfg.dilations[jd];
      const GridSpec g{cfg.d, cfg.n, std::ldexp(cfg.L, j)};
      const DyadicPartition part(g);
      const double T = std::ldexp(cfg.T, 2 * j), beta = std::ldexp(cfg.beta, -2 * j);
      const SpectralField u0 = relabel(bu, g), f0 = relabel(bf, g);
      const auto times = time_grid(T, cfg.time_samples);
      std::vector<std::vector<double>> series;
      const int d = g.d;
      const std::size_t nmodes = g.modes();
      for (double t : times) {
        // Exact per mode: solenoidal part decays at mu, potential part at nu.
        SpectralField u(g, d);
        for_each_mode(g, [&](std::size_t i, const Mode& md) {
          const double r2 = md.rhod * md.rhod;
          const double es = std::exp(-mu * r2 * t), ep = std::exp(-nu * r2 * t);
          const double ct = t * std::exp(-beta * t);
          const double fs = ct * phi_value(PhiKind::Phi1, cplx(t * (beta - mu * r2), 0.0)).real();
          const double fp = ct * phi_value(PhiKind::Phi1, cplx(t * (beta - nu * r2), 0.0)).real();
          cplx vu = 0, vf = 0;
          double e[3] = {0, 0, 0};
          if (md.rhod > 0)
            for (int c = 0; c < d; ++c) e[c] = md.xid[c] / md.rhod;
          for (int c = 0; c < d; ++c) {
            vu += e[c] * u0.data[c * nmodes + i];
            vf += e[c] * f0.data[c * nmodes + i];
          }
          for (int c = 0; c < d; ++c) {
            const cplx pu = u0.data[c * nmodes + i] - e[c] * vu, pf = f0.data[c * nmodes + i] - e[c] * vf;
            u.data[c * nmodes + i] = es * pu + ep * e[c] * vu + fs * pf + fp * e[c] * vf;
          }
        });
        series.push_back(joint_block_norms({&u}, part, {cfg.p}, Part::Full)[0]);
      }
      const auto w = trapezoid(times);
      const double rhs = besov(u0, cfg.s, cfg.p, part) + besov(f0, cfg.s, cfg.p, part) * (1.0 - std::exp(-beta * T)) / beta;
      for (std::size_t ir = 0; ir < rho1s.size(); ++ir) {
        const double rho1 = rho1s[ir];
        const double weight = std::isinf(rho1) ? 1.0 : std::pow(std::min(mu, nu), 1.0 / rho1);
        const double gain = std::isinf(rho1) ? 0.0 : 2.0 / rho1;
        const double lhs = weight * cl_from_series(series, w, part.k_min(), cfg.s + gain, rho1);
        sweeps[ir].ratios[jd].push_back(rhs > 0 ? lhs / rhs : 0.0);
      }
    }
  }
  for (auto& sw : sweeps) finalize_sweep(sw);
  return sweeps;
}

ProbeSweep maximal_regularity_probe(double rho1, int trials, const MaxRegConfig& cfg) {
  return maximal_regularity_sweeps({rho1}, trials, cfg).front();
}

IndexCheck paraproduct_admissible(const ParaSample& smp, int d) {
  IndexCheck c;
  auto fail = [&](const std::string& why) {
    c.accepted = false;
    c.reason = why;
    return c;
  };
  if (!(smp.p <= 2 * smp.q)) return fail("p <= 2q fails");
  const double m = smp.m1 + smp.m2;
  if (smp.remainder) {
    const double pp = smp.p / (smp.p - 1.0);
    if (!(smp.s > m - d * std::min(1.0 / smp.p, 1.0 / pp))) return fail("s > m - d min(1/p, 1/p') fails");
  } else {
    if (!(smp.m1 >= d * std::max(0.0, 1.0 / smp.q - 1.0 / smp.p))) return fail("m1 >= d max(0, 1/q - 1/p) fails");
  }
  return c;
}

ProbeSweep paraproduct_estimate_probe(BilinearKind kind, int trials, const BilinearConfig& cfg, const ParaSample* fixed) {
  if (trials < 1) throw Error("paraproduct_estimate_probe: trials must be positive");
  const GridSpec g{cfg.d, cfg.n, cfg.L};
  const DyadicPartition part(g);
  const int d = g.d;
  ProbeSweep sw;
  sw.name = kind == BilinearKind::Paraproduct ? "paraproduct" : kind == BilinearKind::Product ? "product" : "composition";
  sw.trials = trials;
  for (int s : cfg.scales) sw.scales.push_back(s);
  sw.ratios.assign(sw.scales.size(), {});
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const PressureLaw law{1.4, 1.0};
  for (int tr = 0; tr < trials; ++tr) {
    const unsigned seed = cfg.seed + 53u * tr;
    const SpectralField f = random_band(g, 1, cfg.band_M, 1.0, seed);
    const SpectralField h = random_band(g, 1, cfg.band_M, 1.0, seed + 1);
    if (kind == BilinearKind::Product) {
      const double s = 0.5 + 0.5 * (tr % 3);
      const double p = (tr % 2) ? 4.0 : 2.0;
      for (std::size_t i = 0; i < sw.scales.size(); ++i) {
        const SpectralField fl = dilate_torus(f, cfg.scales[i]), hl = dilate_torus(h, cfg.scales[i]);
        const double lhs = besov(multiply(fl, hl), s, p, part);
        const double rhs = linf(fl) * besov(hl, s, p, part) + linf(hl) * besov(fl, s, p, part);
        sw.ratios[i].push_back(lhs / rhs);
      }
    } else if (kind == BilinearKind::Paraproduct) {
      ParaSample smp;
      if (fixed) {
        smp = *fixed;
      } else {
        const bool second = tr % 2;
        smp.q = second ? 3.0 : 2.0;
        smp.p = second ? 5.0 : 4.0;
        smp.remainder = (tr / 2) % 2;
        smp.m1 = d * std::max(0.0, 1.0 / smp.q - 1.0 / smp.p) + 0.5 * uni(rng);
        smp.m2 = uni(rng) - 0.5;
        smp.s = smp.m1 + smp.m2 + 2.0 * uni(rng);
      }
      const IndexCheck ok = paraproduct_admissible(smp, d);
      if (!ok.accepted) {
        ++sw.skipped;
        std::ostringstream os;
        os << "trial " << tr << " skipped: " << ok.reason << " (q=" << smp.q << " p=" << smp.p << " m1=" << smp.m1
           << " m2=" << smp.m2 << " s=" << smp.s << ")";
        sw.log.push_back(os.str());
        continue;
      }
      const double m = smp.m1 + smp.m2;
      for (std::size_t i = 0; i < sw.scales.size(); ++i) {
        const SpectralField al = dilate_torus(f, cfg.scales[i]), bl = dilate_torus(h, cfg.scales[i]);
        const RealField out = smp.remainder ? remainder_R(al, bl, part) : paraproduct_T(al, bl, part);
        const double lhs = besov(transform(out), smp.s - m + d / smp.q - d / smp.p, smp.q, part);
        const double rhs = besov(al, d / smp.p - smp.m1, smp.p, part) * besov(bl, smp.s - smp.m2, smp.p, part);
        sw.ratios[i].push_back(lhs / rhs);
      }
    } else {
      const double amp = 0.05 + 0.45 * uni(rng);
      const double p = (tr % 2) ? 4.0 : 2.0;
      const int which = tr % 3;
      const SpectralField a = scaled(f, amp);
      for (std::size_t i = 0; i < sw.scales.size(); ++i) {
        const SpectralField al = dilate_torus(a, cfg.scales[i]);
        RealField Fa = inverse(al);
        for (auto& v : Fa.data) v = which == 0 ? PressureLaw::I(v) : which == 1 ? law.k(v) : law.G_times_a(v);
        const double na = besov(al, d / p, p, part);
        const double lhs = besov(transform(Fa), d / p, p, part);
        sw.ratios[i].push_back(lhs / ((1.0 + na) * na));
      }
    }
  }
  for (auto& v : sw.ratios)
    if (v.empty()) v.push_back(0.0);
  finalize_sweep(sw);
  return sw;
}

ProbeSweep commutator_probe(int trials, const CommutatorConfig& cfg) {
  if (trials < 1) throw Error("commutator_probe: trials must be positive");
  const BilinearConfig& bc = cfg.base;
  const GridSpec g{bc.d, bc.n, bc.L};
  const DyadicPartition part(g);
  const int d = g.d;
  ProbeSweep sw;
  sw.name = "commutator";
  sw.trials = trials;
  for (int s : bc.scales) sw.scales.push_back(s);
  sw.ratios.assign(sw.scales.size(), {});
  const ScalarSymbol A = riesz_symbol(0);
  // a(lambda x) and b together must stay below n/2 so T_a b is alias-free.
  const double b_band = std::floor(0.5 * g.n - 1 - bc.band_M * bc.scales.back());
  if (b_band < 2) throw Error("commutator_probe: grid too coarse for the rescaling sweep");
  for (int tr = 0; tr < trials; ++tr) {
    const unsigned seed = bc.seed + 71u * tr;
    const SpectralField a = random_band(g, 1, bc.band_M, 1.0, seed);
    const SpectralField b = random_band(g, 1, b_band, 1.0, seed + 1);
    for (std::size_t i = 0; i < sw.scales.size(); ++i) {
      const SpectralField al = dilate_torus(a, bc.scales[i]);
      const CommutatorResult c = commutator_probe_op(al, b, A, part, cfg.k0);
      if (!c.order_zero) sw.log.push_back("multiplier failed the degree-0 check; bound not expected");
      const double lhs = besov(transform(c.value), cfg.sigma + cfg.s, cfg.q, part);
      const double rhs = besov(gradient(al), cfg.s - 1 + 2.0 * d / cfg.p - d / cfg.q, cfg.p, part) *
                         besov(b, cfg.sigma, cfg.p, part);
      sw.ratios[i].push_back(lhs / rhs);
    }
  }
  finalize_sweep(sw);
  return sw;
}

double bernstein_probe(const GridSpec& g, double a, double b, int trials, unsigned seed) {
  const DyadicPartition part(g);
  double worst = 0;
  for (int tr = 0; tr < trials; ++tr) {
    const SpectralField f = random_band(g, 1, g.n, 1.0, seed + 17u * tr);
    const auto na = joint_block_norms({&f}, part, {a}, Part::Full)[0];
    const SpectralField gf = gradient(f);
    const auto nb = joint_block_norms({&gf}, part, {b}, Part::Full)[0];
    for (int k = part.k_min(); k <= part.k_max(); ++k) {
      const std::size_t i = k - part.k_min();
      if (na[i] == 0) continue;
      const double r = nb[i] / (std::exp2(k * (1.0 + g.d * (1.0 / a - 1.0 / b))) * na[i]);
      worst = std::max(worst, r);
    }
  }
  return worst;
}

double embedding_probe(const GridSpec& g, double sigma, double p1, double p2, int trials, unsigned seed) {
  const DyadicPartition part(g);
  double worst = 0;
  for (int tr = 0; tr < trials; ++tr) {
    const SpectralField f = random_band(g, 1, g.n / 4.0, 1.0, seed + 19u * tr);
    const double lhs = besov(f, sigma - g.d * (1.0 / p1 - 1.0 / p2), p2, part);
    worst = std::max(worst, lhs / besov(f, sigma, p1, part));
  }
  return worst;
}

// -------------------------------------------------------------- continuity

ContinuityResult continuity_probe(const ContinuityConfig& cfg) {
  const auto t0 = Clock::now();
  const GridSpec g{3, cfg.n, cfg.L};
  const DyadicPartition part(g);
  const double p = cfg.pair.p;
  auto xp = [&](const SpectralField& a, const SpectralField& u) {
    return besov(a, 3 / p, p, part) + besov(u, -1 + 3 / p, p, part);
  };
  const SpectralField a0 = random_band(g, 1, 4, cfg.delta, cfg.seed);
  const SpectralField u0 = random_band(g, 3, 4, cfg.delta, cfg.seed + 1);
  SpectralField pa = random_band(g, 1, 8, 1.0, cfg.seed + 2);
  SpectralField pu = random_band(g, 3, 8, 1.0, cfg.seed + 3);
  if (cfg.perturb == "low" || cfg.perturb == "high") {
    const bool low = cfg.perturb == "low";
    auto [la, ha] = split_low_high(pa, part);
    auto [lu, hu] = split_low_high(pu, part);
    pa = low ? la : ha;
    pu = low ? lu : hu;
  } else if (cfg.perturb != "full") {
    throw Error("continuity_probe: perturb must be full, low or high");
  }
  const double pn = xp(pa, pu);
  if (!(pn > 0)) throw Error("continuity_probe: empty perturbation");
  scale_inplace(pa, 1.0 / pn);
  scale_inplace(pu, 1.0 / pn);

  SimConfig sc;
  sc.dt = cfg.dt;
  sc.T = cfg.T;
  sc.track.pairs = {cfg.pair};
  sc.track.track_m = false;
  sc.sample_stride = 1000000;
  sc.dense_early = false;
  sc.snapshot_stride = 5;
  const Trajectory base = simulate(sc, {0.0, a0, u0});
  if (base.failed) throw Error("continuity_probe: base run failed: " + base.failure);
  ContinuityResult res;
  for (double eta : cfg.etas) {
    const Trajectory pert = simulate(sc, {0.0, add(a0, pa, eta), add(u0, pu, eta)});
    if (pert.failed) throw Error("continuity_probe: perturbed run failed: " + pert.failure);
    double dist = 0;
    for (std::size_t i = 0; i < base.snapshots.size(); ++i) {
      const SpectralField da = add(pert.snapshots[i].a, base.snapshots[i].a, -1.0);
      const SpectralField du = add(pert.snapshots[i].u, base.snapshots[i].u, -1.0);
      dist = std::max(dist, xp(da, du));
    }
    res.etas.push_back(eta);
    res.distances.push_back(dist);
  }
  res.min_factor = kInf;
  for (std::size_t i = 1; i < res.distances.size(); ++i) {
    if (!(res.distances[i] < res.distances[i - 1])) res.monotone = false;
    res.min_factor = std::min(res.min_factor, res.distances[i - 1] / res.distances[i]);
  }
  auto& rep = res.report;
  rep.name = "continuity";
  rep.config = "perturb=" + cfg.perturb;
  for (std::size_t i = 0; i < res.etas.size(); ++i) rep.add("distance eta=" + std::to_string(res.etas[i]), res.distances[i]);
  rep.runtime_s = seconds_since(t0);
  return res;
}

}  // namespace cnslab
