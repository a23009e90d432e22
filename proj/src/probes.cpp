#include "cnslab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cnslab/besov.hpp"
#include "cnslab/dyadic.hpp"
#include "cnslab/fft.hpp"

namespace cnslab {

double plateau_window(double rho) {
  if (rho < 1.01 || rho > 2.0) return 0.0;
  double s = std::sin(kPi * (rho - 1.01) / 0.99);
  return s * s;
}

SpectralField plateau_data(const GridSpec& g) {
  g.validate();
  if (g.nyquist() < 2.0) throw Error("plateau_data: grid Nyquist below the block-0 band");
  SpectralField sf(g, 1);
  for_each_mode(g, [&](std::size_t idx, const Mode& md) { sf.data[idx] = plateau_window(md.rho); });
  return sf;
}

std::vector<double> complex_radial_norms(const SpectralField& fhat, const RadialSymbol& m, const std::vector<double>& ps) {
  if (fhat.components != 1) throw Error("complex_radial_norms: scalar field expected");
  const GridSpec& g = fhat.grid;
  AlignedVector<cplx> re(g.modes()), im(g.modes());
  for_each_mode(g, [&](std::size_t idx, const Mode& md) {
    const cplx f = fhat.data[idx];
    if (f == cplx(0.0)) {
      re[idx] = im[idx] = 0.0;
      return;
    }
    const cplx v = m(md.rho);
    re[idx] = f * v.real();
    im[idx] = f * v.imag();
  });
  AlignedVector<double> r(g.points()), s(g.points());
  inverse_component(g, re.data(), r.data());
  inverse_component(g, im.data(), s.data());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = r[i] * r[i] + s[i] * s[i];
  std::vector<double> out;
  out.reserve(ps.size());
  for (double p : ps) out.push_back(lp_from_mag2(r.data(), r.size(), g.cell_volume(), p));
  return out;
}

namespace {

double plancherel_ratio(const SpectralField& w, const RadialSymbol& m) {
  double num = 0, den = 0;
  for_each_mode(w.grid, [&](std::size_t idx, const Mode& md) {
    const double f2 = std::norm(w.data[idx]);
    if (f2 == 0) return;
    num += md.weight * f2 * std::norm(m(md.rho));
    den += md.weight * f2;
  });
  return std::sqrt(num / den);
}

// Caches the reference norm of the unmodified window.
class Amplifier {
 public:
  Amplifier(const SpectralField& w, double p) : w_(w), p_(p) {
    if (p != 2) base_ = complex_radial_norms(w_, [](double) { return cplx(1.0); }, {norm_p()})[0];
  }
  double operator()(const RadialSymbol& m) const {
    if (p_ == 2) return plancherel_ratio(w_, m);
    return complex_radial_norms(w_, m, {norm_p()})[0] / base_;
  }

 private:
  // Kernel operator norms on L^1 and L^inf coincide by duality.
  double norm_p() const { return (p_ == 1 || std::isinf(p_)) ? 1.0 : p_; }
  const SpectralField& w_;
  double p_;
  double base_ = 1;
};

void check_p(double p, const char* where) {
  if (!(p >= 1)) throw Error(std::string(where) + ": p must lie in [1, inf]");
}

}  // namespace

double amplification(const SpectralField& window, const RadialSymbol& m, double p) {
  check_p(p, "amplification");
  return Amplifier(window, p)(m);
}

double max_admissible_tau(const LowDecayConfig& cfg, int k) {
  const double speed = std::sqrt(cfg.prm.pressure_slope);
  return (cfg.L / 2 - cfg.support_radius) * std::ldexp(1.0, k) / speed;
}

LowDecayResult low_decay_probe(const LowDecayConfig& cfg) {
  cfg.prm.validate();
  check_p(cfg.p, "low_decay_probe");
  if (cfg.k_list.size() < 2) throw Error("low_decay_probe: need at least two blocks");
  for (int k : cfg.k_list)
    if (k > 0) throw Error("low_decay_probe: blocks must satisfy k <= 0");
  for (double tau : cfg.tau_list) {
    bool bad = false;
    for (int k : cfg.k_list) bad = bad || tau > max_admissible_tau(cfg, k);
    if (bad) {
      std::ostringstream os;
      os << "low_decay_probe: wrap guard violated for tau=" << tau << "; maximal admissible tau per k:";
      for (int k : cfg.k_list) os << " k=" << k << ":" << max_admissible_tau(cfg, k);
      throw Error(os.str());
    }
  }
  const GridSpec g{cfg.d, cfg.n, cfg.L};
  const SpectralField w = plateau_data(g);
  const Amplifier amp(w, cfg.p);
  const LameParams prm = cfg.prm;

  LowDecayResult res;
  for (double tau : cfg.tau_list) {
    std::vector<double> xs, ys;
    const std::size_t first = res.rows.size();
    for (int k : cfg.k_list) {
      const double t = std::ldexp(tau, -2 * k);
      const double v = amp([&](double r) { return std::exp(t * eigenvalues(std::ldexp(r, k), prm).lam_plus); });
      ProbeRow row;
      row.d = cfg.d;
      row.p = cfg.p;
      row.k = k;
      row.tau = tau;
      row.value = v;
      res.rows.push_back(row);
      xs.push_back(k);
      ys.push_back(std::log2(v));
    }
    DecayFit df{tau, fit_line(xs, ys)};
    for (std::size_t i = first; i < res.rows.size(); ++i) {
      res.rows[i].fitted_slope = df.fit.slope;
      res.rows[i].ci_low = df.fit.ci_low;
      res.rows[i].ci_high = df.fit.ci_high;
    }
    res.fits.push_back(df);
  }
  return res;
}

WaveResult wave_growth_probe(const WaveConfig& cfg) {
  if (cfg.t_list.empty()) throw Error("wave_growth_probe: empty time list");
  const double tmax = *std::max_element(cfg.t_list.begin(), cfg.t_list.end());
  if (tmax + cfg.support_radius > cfg.L / 2) {
    std::ostringstream os;
    os << "wave_growth_probe: wrap guard violated; maximal admissible t = " << cfg.L / 2 - cfg.support_radius;
    throw Error(os.str());
  }
  const GridSpec g{cfg.d, cfg.n, cfg.L};
  const SpectralField w = plateau_data(g);
  const Amplifier amp(w, 1.0);
  WaveResult res;
  std::vector<double> xs, ys;
  for (double t : cfg.t_list) {
    if (t < 0) throw Error("wave_growth_probe: negative time");
    const double v = amp([t](double r) { return std::exp(cplx(0.0, t * r)); });
    ProbeRow row;
    row.d = cfg.d;
    row.p = 1;
    row.k = 0;
    row.tau = t;
    row.value = v;
    res.rows.push_back(row);
    if (t <= 1.0) res.small_t_max_ratio = std::max(res.small_t_max_ratio, v);
    if (t >= cfg.fit_lo && t <= cfg.fit_hi) {
      xs.push_back(std::log(t));
      ys.push_back(std::log(v));
    }
  }
  res.fit = fit_line(xs, ys);
  for (auto& r : res.rows) {
    r.fitted_slope = res.fit.slope;
    r.ci_low = res.fit.ci_low;
    r.ci_high = res.fit.ci_high;
  }
  return res;
}

cplx h_symbol(double rho, const LameParams& prm) { return -eigenvalues(rho, prm).lam_plus; }

cplx htilde_symbol(double rho, const LameParams& prm) {
  return h_symbol(rho, prm) + cplx(0.0, std::sqrt(prm.pressure_slope) * rho);
}

double scaling_identity_check(int k, double p, double t, const ScalingConfig& cfg) {
  check_p(p, "scaling_identity_check");
  if (t < 0) throw Error("scaling_identity_check: negative time");
  const GridSpec g{cfg.d, cfg.n, cfg.L};
  g.validate();
  const GridSpec gk{cfg.d, cfg.n, std::ldexp(cfg.L, k)};
  try {
    gk.validate();
  } catch (const Error& e) {
    throw Error(std::string("scaling_identity_check: unrepresentable dilation: ") + e.what());
  }
  const DyadicPartition part(g), partk(gk);
  if (k < part.k_min() || k > part.k_max() || 0 < partk.k_min() || 0 > partk.k_max())
    throw Error("scaling_identity_check: unrepresentable dilation for block " + std::to_string(k));

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> nd;
  RealField f(g, 1);
  for (auto& v : f.data) v = nd(rng);
  const SpectralField fh = transform(f);
  SpectralField fk = fh;
  fk.grid = gk;

  const LameParams prm = cfg.prm;
  const double lhs = complex_radial_norms(
      fh, [&](double r) { return part.block(k, r) * std::exp(-t * h_symbol(r, prm)); }, {p})[0];
  const double rhs =
      std::pow(2.0, -k * cfg.d / p) *
      complex_radial_norms(
          fk, [&](double r) { return partk.block(0, r) * std::exp(-t * h_symbol(std::ldexp(r, k), prm)); }, {p})[0];
  if (lhs == 0) return rhs == 0 ? 0.0 : kInf;
  return std::abs(lhs - rhs) / lhs;
}

ParabolicResult parabolic_bound_probe(const RadialSymbol& htilde, const std::vector<int>& k_list, double p,
                                      const ParabolicConfig& cfg) {
  check_p(p, "parabolic_bound_probe");
  if (k_list.empty() || cfg.tau_list.empty()) throw Error("parabolic_bound_probe: empty sweep");
  const GridSpec g{cfg.d, cfg.n, cfg.L};
  const SpectralField w = plateau_data(g);
  const Amplifier amp(w, p);
  // Re h = nu rho^2 / 2 on the band, at most 2 nu on the window.
  const double c_low = 2.0 * cfg.prm.nu();
  ParabolicResult res;
  res.max_upper = 0;
  res.min_lower = kInf;
  for (int k : k_list) {
    double up = 0, lo = kInf;
    for (double tau : cfg.tau_list) {
      const double t = std::ldexp(tau, -2 * k);
      const double v = amp([&](double r) { return std::exp(-t * htilde(std::ldexp(r, k))); });
      const double upper = std::exp(tau / 2) * v;
      const double lower = std::exp(c_low * tau) * v;
      up = std::max(up, upper);
      lo = std::min(lo, lower);
      ProbeRow row;
      row.d = cfg.d;
      row.p = p;
      row.k = k;
      row.tau = tau;
      row.value = upper;
      res.rows.push_back(row);
    }
    res.upper_per_k.push_back(up);
    res.lower_per_k.push_back(lo);
    res.max_upper = std::max(res.max_upper, up);
    res.min_lower = std::min(res.min_lower, lo);
  }
  const auto [mn, mx] = std::minmax_element(res.upper_per_k.begin(), res.upper_per_k.end());
  res.variation = *mx / *mn;
  return res;
}

}  // namespace cnslab
