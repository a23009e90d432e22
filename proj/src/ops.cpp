#include "cnslab/ops.hpp"

#include <algorithm>
#include <vector>

namespace cnslab {
namespace {

// Partner index of a mode on a self-conjugate plane (last index 0 or n/2).
std::size_t conj_partner(const GridSpec& g, const Mode& md) {
  std::array<int, 3> p{0, 0, 0};
  for (int a = 0; a < g.d - 1; ++a) p[a] = (md.m[a] == g.n / 2) ? g.n / 2 : -md.m[a];
  p[g.d - 1] = md.m[g.d - 1];
  return mode_index(g, p);
}

bool self_conjugate_plane(const GridSpec& g, const Mode& md) {
  int last = md.m[g.d - 1];
  return last == 0 || last == g.n / 2;
}

void check_hermitian(const GridSpec& g, const std::vector<cplx>& vals, int stride) {
  double scale = 0, defect = 0;
  for (const cplx& v : vals) scale = std::max(scale, std::abs(v));
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    if (!self_conjugate_plane(g, md)) return;
    std::size_t j = conj_partner(g, md);
    for (int s = 0; s < stride; ++s)
      defect = std::max(defect, std::abs(vals[i * stride + s] - std::conj(vals[j * stride + s])));
    if (j == i)
      for (int s = 0; s < stride; ++s) defect = std::max(defect, std::abs(vals[i * stride + s].imag()));
  });
  if (defect > 1e-12 * std::max(1.0, scale))
    throw Error("apply_multiplier: symbol is not Hermitian-compatible (m(-xi) != conj m(xi)); real output impossible");
}

}  // namespace

SpectralField apply_multiplier(const SpectralField& sf, const ScalarSymbol& m, const MultiplierOptions& opts) {
  const GridSpec& g = sf.grid;
  std::vector<cplx> vals(g.modes());
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    cplx v = (md.rho == 0.0 && opts.zero_mode_supplied) ? opts.zero_mode_value : m(md);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error("apply_multiplier: non-finite symbol value");
    vals[i] = v;
  });
  if (opts.require_real) check_hermitian(g, vals, 1);
  SpectralField out(g, sf.components);
  const std::size_t nm = g.modes();
  for (int c = 0; c < sf.components; ++c)
    for (std::size_t i = 0; i < nm; ++i) out.data[c * nm + i] = vals[i] * sf.data[c * nm + i];
  return out;
}

SpectralField apply_multiplier(const SpectralField& sf, const MatrixSymbol& m, const MultiplierOptions& opts) {
  const GridSpec& g = sf.grid;
  const int nc = sf.components;
  const std::size_t nm = g.modes();
  std::vector<cplx> vals(nm * nc * nc);
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    cplx* dst = vals.data() + i * nc * nc;
    if (md.rho == 0.0 && opts.zero_mode_supplied) {
      for (int r = 0; r < nc * nc; ++r) dst[r] = 0.0;
      for (int r = 0; r < nc; ++r) dst[r * nc + r] = opts.zero_mode_value;
    } else {
      m(md, dst);
    }
  });
  if (opts.require_real) check_hermitian(g, vals, nc * nc);
  SpectralField out(g, nc);
  for (std::size_t i = 0; i < nm; ++i) {
    const cplx* mat = vals.data() + i * nc * nc;
    for (int r = 0; r < nc; ++r) {
      cplx s = 0;
      for (int c = 0; c < nc; ++c) s += mat[r * nc + c] * sf.data[c * nm + i];
      out.data[r * nm + i] = s;
    }
  }
  return out;
}

SpectralField leray_project(const SpectralField& u, Projector which) {
  const GridSpec& g = u.grid;
  if (u.components != g.d) throw Error("leray_project: input must be a vector field with d components");
  SpectralField out(g, g.d);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    if (md.rhod == 0.0) {
      for (int c = 0; c < g.d; ++c) out.data[c * nm + i] = (which == Projector::P) ? u.data[c * nm + i] : cplx(0.0);
      return;
    }
    cplx dot = 0;
    for (int c = 0; c < g.d; ++c) dot += md.xid[c] * u.data[c * nm + i];
    const double inv = 1.0 / (md.rhod * md.rhod);
    for (int c = 0; c < g.d; ++c) {
      cplx q = md.xid[c] * dot * inv;
      out.data[c * nm + i] = (which == Projector::Q) ? q : u.data[c * nm + i] - q;
    }
  });
  return out;
}

SpectralField gradient(const SpectralField& s) {
  const GridSpec& g = s.grid;
  if (s.components != 1) throw Error("gradient: scalar input required");
  SpectralField out(g, g.d);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    for (int c = 0; c < g.d; ++c) out.data[c * nm + i] = cplx(0.0, md.xid[c]) * s.data[i];
  });
  return out;
}

SpectralField divergence(const SpectralField& v) {
  const GridSpec& g = v.grid;
  if (v.components != g.d) throw Error("divergence: vector input required");
  SpectralField out(g, 1);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    cplx s = 0;
    for (int c = 0; c < g.d; ++c) s += cplx(0.0, md.xid[c]) * v.data[c * nm + i];
    out.data[i] = s;
  });
  return out;
}

SpectralField partial(const SpectralField& sf, int axis) {
  const GridSpec& g = sf.grid;
  if (axis < 0 || axis >= g.d) throw Error("partial: axis out of range");
  SpectralField out(g, sf.components);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    for (int c = 0; c < sf.components; ++c) out.data[c * nm + i] = cplx(0.0, md.xid[axis]) * sf.data[c * nm + i];
  });
  return out;
}

SpectralField laplacian(const SpectralField& sf) {
  SpectralField out(sf.grid, sf.components);
  const std::size_t nm = sf.grid.modes();
  for_each_mode(sf.grid, [&](std::size_t i, const Mode& md) {
    for (int c = 0; c < sf.components; ++c) out.data[c * nm + i] = -(md.rhod * md.rhod) * sf.data[c * nm + i];
  });
  return out;
}

SpectralField lame(const SpectralField& u, double mu, double lambda2) {
  const GridSpec& g = u.grid;
  if (u.components != g.d) throw Error("lame: vector input required");
  SpectralField out(g, g.d);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    cplx dot = 0;
    for (int c = 0; c < g.d; ++c) dot += md.xid[c] * u.data[c * nm + i];
    for (int c = 0; c < g.d; ++c)
      out.data[c * nm + i] = -mu * md.rhod * md.rhod * u.data[c * nm + i] - (mu + lambda2) * md.xid[c] * dot;
  });
  return out;
}

SpectralField curl3(const SpectralField& u) {
  const GridSpec& g = u.grid;
  if (g.d != 3 || u.components != 3) throw Error("curl3: 3-d vector field required");
  SpectralField out(g, 3);
  const std::size_t nm = g.modes();
  for_each_mode(g, [&](std::size_t i, const Mode& md) {
    const cplx I(0.0, 1.0);
    cplx u0 = u.data[i], u1 = u.data[nm + i], u2 = u.data[2 * nm + i];
    out.data[i] = I * (md.xid[1] * u2 - md.xid[2] * u1);
    out.data[nm + i] = I * (md.xid[2] * u0 - md.xid[0] * u2);
    out.data[2 * nm + i] = I * (md.xid[0] * u1 - md.xid[1] * u0);
  });
  return out;
}

SpectralField inverse_neg_laplacian(const SpectralField& sf) {
  SpectralField out(sf.grid, sf.components);
  const std::size_t nm = sf.grid.modes();
  for_each_mode(sf.grid, [&](std::size_t i, const Mode& md) {
    const double f = md.rhod > 0 ? 1.0 / (md.rhod * md.rhod) : 0.0;
    for (int c = 0; c < sf.components; ++c) out.data[c * nm + i] = f * sf.data[c * nm + i];
  });
  return out;
}

bool dealias_keep(const GridSpec& g, const Mode& md) {
  for (int a = 0; a < g.d; ++a)
    if (3 * std::abs(md.m[a]) >= g.n) return false;
  return true;
}

void dealias_inplace(SpectralField& sf) {
  const std::size_t nm = sf.grid.modes();
  for_each_mode(sf.grid, [&](std::size_t i, const Mode& md) {
    if (dealias_keep(sf.grid, md)) return;
    for (int c = 0; c < sf.components; ++c) sf.data[c * nm + i] = 0.0;
  });
}

SpectralField add(const SpectralField& a, const SpectralField& b, double cb) {
  require_same_grid(a.grid, b.grid, "add");
  if (a.components != b.components) throw Error("add: component mismatch");
  SpectralField out(a.grid, a.components);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] + cb * b.data[i];
  return out;
}

SpectralField scaled(const SpectralField& a, double c) {
  SpectralField out(a.grid, a.components);
  for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = c * a.data[i];
  return out;
}

SpectralField component(const SpectralField& sf, int c) {
  if (c < 0 || c >= sf.components) throw Error("component: index out of range");
  SpectralField out(sf.grid, 1);
  std::copy(sf.comp(c), sf.comp(c) + sf.grid.modes(), out.data.begin());
  return out;
}

double max_abs(const RealField& f) {
  double m = 0;
  for (double v : f.data) m = std::max(m, std::abs(v));
  return m;
}

double max_abs(const SpectralField& f) {
  double m = 0;
  for (const cplx& v : f.data) m = std::max(m, std::abs(v));
  return m;
}

RealField pointwise_product(const RealField& f, const RealField& g) {
  require_same_grid(f.grid, g.grid, "pointwise_product");
  if (f.components != 1 || g.components != 1) throw Error("pointwise_product: scalar fields required");
  RealField out(f.grid, 1);
  for (std::size_t i = 0; i < f.data.size(); ++i) out.data[i] = f.data[i] * g.data[i];
  return out;
}

}  // namespace cnslab
