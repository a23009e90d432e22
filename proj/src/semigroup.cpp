#include "cnslab/semigroup.hpp"

#include <algorithm>
#include <unordered_map>

#include "cnslab/ops.hpp"

namespace cnslab {

void LameParams::validate() const {
  if (!(mu > 0)) throw Error("material: mu > 0 required (μ > 0)");
  if (!(nu() > 0)) throw Error("material: 2mu + lambda > 0 required (2μ+λ > 0)");
  if (!(pressure_slope > 0)) throw Error("material: pressure slope must be positive");
}

EigenPair eigenvalues(double rho, const LameParams& prm) {
  if (!(rho >= 0)) throw Error("eigenvalues: rho must be nonnegative");
  const double nu = prm.nu(), g = prm.pressure_slope;
  const double sigma = -0.5 * nu * rho * rho;
  const double disc = rho * rho * (nu * nu * rho * rho - 4.0 * g);
  EigenPair e;
  e.rho = rho;
  if (disc >= 0) {
    const double w = 0.5 * std::sqrt(disc);
    const double lm = sigma - w;
    e.lam_minus = lm;
    e.lam_plus = (lm == 0.0) ? 0.0 : g * rho * rho / lm;
  } else {
    const double w = 0.5 * std::sqrt(-disc);
    e.lam_plus = cplx(sigma, w);
    e.lam_minus = cplx(sigma, -w);
  }
  return e;
}

double stiff_rate(double rho, const LameParams& prm) {
  EigenPair e = eigenvalues(rho, prm);
  return std::max({std::abs(e.lam_plus), std::abs(e.lam_minus), prm.mu * rho * rho});
}

cplx phi_value(PhiKind kind, cplx z) {
  switch (kind) {
    case PhiKind::Exp:
      return std::exp(z);
    case PhiKind::Phi1: {
      if (std::abs(z) < 0.5) {
        cplx term = 1.0, sum = 0.0;
        for (int k = 0; k < 20; ++k) {
          sum += term;
          term *= z / static_cast<double>(k + 2);
        }
        return sum;
      }
      return (std::exp(z) - 1.0) / z;
    }
    case PhiKind::Phi2: {
      if (std::abs(z) < 1.0) {
        cplx term = 0.5, sum = 0.0;
        for (int k = 0; k < 24; ++k) {
          sum += term;
          term *= z / static_cast<double>(k + 3);
        }
        return sum;
      }
      return (std::exp(z) - 1.0 - z) / (z * z);
    }
  }
  return 0.0;
}

namespace {

// g_n(c) = int_0^1 s^n e^{cs} ds for n = 0..nmax.
std::vector<double> moment_integrals(int nmax, double c) {
  std::vector<double> g(nmax + 1);
  if (std::abs(c) <= 8.0) {
    for (int n = 0; n <= nmax; ++n) {
      double term = 1.0, sum = 0.0;
      for (int k = 0; k < 80; ++k) {
        double add = term / (n + k + 1);
        sum += add;
        if (k > 2 * std::abs(c) + 4 && std::abs(add) < 1e-18 * std::abs(sum)) break;
        term *= c / (k + 1);
      }
      g[n] = sum;
    }
  } else {
    const double ec = std::exp(c);
    g[0] = std::expm1(c) / c;
    for (int n = 1; n <= nmax; ++n) g[n] = (ec - n * g[n - 1]) / c;
  }
  return g;
}

struct SA {
  double S = 1, A = 1;
};

constexpr int kSeriesTerms = 8;
constexpr double kSeriesThreshold = 0.05;

// S = (f(c+W) + f(c-W))/2, A = (f(c+W) - f(c-W))/(2W) for W real or imaginary:
// W2 = W^2 (negative when imaginary).
SA eval_SA(PhiKind kind, double c, double W2, double zplus_real, double zminus_real, Evaluation ev) {
  const double absW = std::sqrt(std::abs(W2));
  bool series = (ev == Evaluation::Series) || (ev == Evaluation::Auto && absW < kSeriesThreshold);
  SA r;
  if (series) {
    const int nmax = 2 * kSeriesTerms + 2;
    std::vector<double> der(nmax + 1);
    if (kind == PhiKind::Exp) {
      std::fill(der.begin(), der.end(), std::exp(c));
    } else {
      auto g = moment_integrals(nmax + 1, c);
      for (int n = 0; n <= nmax; ++n) der[n] = (kind == PhiKind::Phi1) ? g[n] : g[n] - g[n + 1];
    }
    double S = 0, A = 0, pw = 1.0, fe = 1.0, fo = 1.0;  // pw = W2^j, fe = (2j)!, fo = (2j+1)!
    for (int j = 0; j <= kSeriesTerms; ++j) {
      S += der[2 * j] * pw / fe;
      A += der[2 * j + 1] * pw / fo;
      pw *= W2;
      fe *= (2.0 * j + 1) * (2.0 * j + 2);
      fo *= (2.0 * j + 2) * (2.0 * j + 3);
    }
    r.S = S;
    r.A = A;
    return r;
  }
  if (W2 >= 0) {
    const double fp = phi_value(kind, zplus_real).real();
    const double fm = phi_value(kind, zminus_real).real();
    r.S = 0.5 * (fp + fm);
    r.A = (fp - fm) / (2.0 * absW);
  } else {
    const cplx fp = phi_value(kind, cplx(c, absW));
    r.S = fp.real();
    r.A = fp.imag() / absW;
  }
  return r;
}

struct PotentialSA {
  SA sa;
  double sigma0 = 0;  // -nu rho^2 / 2
};

PotentialSA potential_SA(double rho, double h, const LameParams& prm, PhiKind kind, double shift, Evaluation ev) {
  const double nu = prm.nu(), g = prm.pressure_slope;
  const double sigma0 = -0.5 * nu * rho * rho;
  const double w2 = 0.25 * rho * rho * (nu * nu * rho * rho - 4.0 * g);  // w^2, may be negative
  const double c = h * (sigma0 + shift);
  const double W2 = h * h * w2;
  double zp = 0, zm = 0;
  if (w2 >= 0) {
    const double w = std::sqrt(w2);
    const double lm = sigma0 - w;
    const double lp = (lm == 0.0) ? 0.0 : g * rho * rho / lm;
    zp = h * (lp + shift);
    zm = h * (lm + shift);
  }
  return {eval_SA(kind, c, W2, zp, zm, ev), sigma0};
}

}  // namespace

double phi_derivative(PhiKind kind, int n, double c) {
  if (n < 0) throw Error("phi_derivative: negative order");
  if (kind == PhiKind::Exp) return std::exp(c);
  auto g = moment_integrals(n + 1, c);
  return kind == PhiKind::Phi1 ? g[n] : g[n] - g[n + 1];
}

BlockCoeffs block_function(double rho, double h, const LameParams& prm, PhiKind kind, double shift, Evaluation ev) {
  PotentialSA p = potential_SA(rho, h, prm, kind, shift, ev);
  BlockCoeffs b;
  const double Ah = p.sa.A * h;
  b.aa = p.sa.S - Ah * p.sigma0;
  b.av = Ah * rho;
  b.va = Ah * prm.pressure_slope * rho;
  b.vv = p.sa.S + Ah * p.sigma0;
  b.sol = phi_value(kind, cplx(h * (-prm.mu * rho * rho + shift), 0.0)).real();
  return b;
}

GreenDD green_divided_differences(double rho, double t, const LameParams& prm, Evaluation ev) {
  if (!(t >= 0)) throw Error("green symbol: negative time");
  PotentialSA p = potential_SA(rho, t, prm, PhiKind::Exp, 0.0, ev);
  const double beta = p.sa.A * t;
  GreenDD dd;
  dd.D1 = p.sa.S - beta * p.sigma0;
  dd.D2 = -beta;
  dd.D3 = p.sa.S + beta * p.sigma0;
  return dd;
}

std::vector<cplx> green_symbol(const std::array<double, 3>& xi, int d, double t, const LameParams& prm) {
  if (d < 1 || d > 3) throw Error("green_symbol: d must be 1..3");
  double r2 = 0;
  for (int i = 0; i < d; ++i) r2 += xi[i] * xi[i];
  const double rho = std::sqrt(r2);
  GreenDD dd = green_divided_differences(rho, t, prm);
  const double sol = std::exp(-prm.mu * r2 * t);
  const int n = d + 1;
  std::vector<cplx> G(n * n, 0.0);
  const cplx I(0.0, 1.0);
  G[0] = dd.D1;
  for (int j = 0; j < d; ++j) {
    G[j + 1] = I * dd.D2 * xi[j];                           // a <- u_j
    G[(j + 1) * n] = I * prm.pressure_slope * dd.D2 * xi[j];  // u_j <- a
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const double pij = rho > 0 ? xi[i] * xi[j] / r2 : 0.0;
      const double delta = (i == j) ? 1.0 : 0.0;
      G[(i + 1) * n + (j + 1)] = sol * (delta - pij) + dd.D3 * pij;
    }
  return G;
}

SpectralState zero_state(const GridSpec& g) {
  SpectralState s;
  s.a = SpectralField(g, 1);
  s.u = SpectralField(g, g.d);
  return s;
}

ModeTable::ModeTable(const GridSpec& g, double h, const LameParams& prm, PhiKind kind, double shift) : grid_(g) {
  prm.validate();
  c_.resize(g.modes());
  std::unordered_map<long long, BlockCoeffs> cache;
  const double dk = g.dk();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    long long key = 0;
    for (int a = 0; a < g.d; ++a) {
      long long m = (std::abs(md.m[a]) == g.n / 2) ? 0 : md.m[a];
      key += m * m;
    }
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, block_function(dk * std::sqrt(static_cast<double>(key)), h, prm, kind, shift)).first;
    c_[i] = it->second;
  });
}

void ModeTable::apply(const SpectralField& a, const SpectralField& u, SpectralField& a_out, SpectralField& u_out,
                      bool accumulate) const {
  require_same_grid(a.grid, grid_, "ModeTable::apply");
  require_same_grid(u.grid, grid_, "ModeTable::apply");
  const int d = grid_.d;
  const std::size_t nm = grid_.modes();
  if (a_out.data.size() != nm) a_out = SpectralField(grid_, 1);
  if (u_out.data.size() != nm * d) u_out = SpectralField(grid_, d);
  const cplx I(0.0, 1.0);
  for_each_mode(grid_, [&](std::size_t i, const Mode& md) {
    const BlockCoeffs& b = c_[i];
    const cplx av = a.data[i];
    cplx na, nu[3];
    if (md.rhod == 0.0) {
      na = b.aa * av;
      for (int c = 0; c < d; ++c) nu[c] = b.sol * u.data[c * nm + i];
    } else {
      double e[3] = {0, 0, 0};
      for (int c = 0; c < d; ++c) e[c] = md.xid[c] / md.rhod;
      cplx v = 0;
      for (int c = 0; c < d; ++c) v += e[c] * u.data[c * nm + i];
      na = b.aa * av - I * b.av * v;
      const cplx nv = -I * b.va * av + b.vv * v;
      for (int c = 0; c < d; ++c) nu[c] = b.sol * (u.data[c * nm + i] - e[c] * v) + e[c] * nv;
    }
    if (accumulate) {
      a_out.data[i] += na;
      for (int c = 0; c < d; ++c) u_out.data[c * nm + i] += nu[c];
    } else {
      a_out.data[i] = na;
      for (int c = 0; c < d; ++c) u_out.data[c * nm + i] = nu[c];
    }
  });
}

SpectralState apply_green(const SpectralState& s, double t, const LameParams& prm) {
  if (!(t >= 0)) throw Error("apply_green: negative time");
  if (t == 0) return s;
  ModeTable tab(s.a.grid, t, prm, PhiKind::Exp);
  SpectralState out;
  out.t = s.t + t;
  tab.apply(s.a, s.u, out.a, out.u);
  return out;
}

std::vector<SpectralState> solve_linear_duhamel(const SpectralState& s0, const Forcing& forcing, double T, int steps,
                                                const LameParams& prm) {
  if (steps < 2) throw Error("solve_linear_duhamel: steps must be >= 2");
  if (!(T > 0)) throw Error("solve_linear_duhamel: T must be positive");
  const double h = T / steps;
  ModeTable G(s0.a.grid, h, prm, PhiKind::Exp);
  std::vector<SpectralState> traj;
  traj.reserve(steps + 1);
  traj.push_back(s0);
  auto F = forcing(s0.t);
  for (int i = 0; i < steps; ++i) {
    const SpectralState& cur = traj.back();
    SpectralField wa = add(cur.a, F.first, 0.5 * h);
    SpectralField wu = add(cur.u, F.second, 0.5 * h);
    SpectralState next;
    next.t = s0.t + (i + 1) * h;
    G.apply(wa, wu, next.a, next.u);
    F = forcing(next.t);
    for (std::size_t j = 0; j < next.a.data.size(); ++j) next.a.data[j] += 0.5 * h * F.first.data[j];
    for (std::size_t j = 0; j < next.u.data.size(); ++j) next.u.data[j] += 0.5 * h * F.second.data[j];
    traj.push_back(std::move(next));
  }
  return traj;
}

}  // namespace cnslab
