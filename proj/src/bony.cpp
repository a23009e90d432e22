#include "cnslab/bony.hpp"

#include "cnslab/fft.hpp"

namespace cnslab {

BlockStack block_stack(const SpectralField& f, const DyadicPartition& part) {
  require_same_grid(f.grid, part.grid(), "block_stack");
  if (f.components != 1) throw Error("block_stack: scalar field required");
  BlockStack st;
  st.mean = f.data[0].real();
  st.kmin = part.k_min();
  for (int k = part.k_min(); k <= part.k_max(); ++k) st.blocks.push_back(inverse(lp_block(f, part, k)));
  return st;
}

namespace {

RealField paraproduct_from(const BlockStack& F, const BlockStack& G, const DyadicPartition& part) {
  const GridSpec& g = part.grid();
  const std::size_t np = g.points();
  RealField out(g, 1);
  AlignedVector<double> low(np, F.mean);  // S_{j-1} F, starting with j = k_min
  for (int j = part.k_min(); j <= part.k_max(); ++j) {
    if (j - 2 >= part.k_min()) {
      const double* add = F.at(j - 2).comp(0);
      for (std::size_t i = 0; i < np; ++i) low[i] += add[i];
    }
    const double* gb = G.at(j).comp(0);
    for (std::size_t i = 0; i < np; ++i) out.data[i] += low[i] * gb[i];
  }
  return out;
}

RealField remainder_from(const BlockStack& F, const BlockStack& G, const DyadicPartition& part) {
  const std::size_t np = part.grid().points();
  RealField out(part.grid(), 1);
  for (int j = part.k_min(); j <= part.k_max(); ++j) {
    const double* gb = G.at(j).comp(0);
    for (int l = j - 1; l <= j + 1; ++l) {
      if (l < part.k_min() || l > part.k_max()) continue;
      const double* fb = F.at(l).comp(0);
      for (std::size_t i = 0; i < np; ++i) out.data[i] += fb[i] * gb[i];
    }
  }
  return out;
}

}  // namespace

RealField paraproduct_T(const SpectralField& f, const SpectralField& g, const DyadicPartition& part) {
  require_same_grid(f.grid, g.grid, "paraproduct_T");
  return paraproduct_from(block_stack(f, part), block_stack(g, part), part);
}

RealField remainder_R(const SpectralField& f, const SpectralField& g, const DyadicPartition& part) {
  require_same_grid(f.grid, g.grid, "remainder_R");
  return remainder_from(block_stack(f, part), block_stack(g, part), part);
}

BonyParts bony_decomposition(const SpectralField& f, const SpectralField& g, const DyadicPartition& part) {
  require_same_grid(f.grid, g.grid, "bony_decomposition");
  const BlockStack F = block_stack(f, part), G = block_stack(g, part);
  return {paraproduct_from(F, G, part), paraproduct_from(G, F, part), remainder_from(F, G, part)};
}

double bony_mean_correction(const SpectralField& f, const SpectralField& g) { return f.data[0].real() * g.data[0].real(); }

ScalarSymbol riesz_symbol(int axis) {
  return [axis](const Mode& md) -> cplx {
    if (md.rhod == 0.0) return 0.0;
    return cplx(0.0, -md.xid[axis] / md.rhod);
  };
}

CommutatorResult commutator_probe_op(const SpectralField& a, const SpectralField& b, const ScalarSymbol& A,
                                     const DyadicPartition& part, int k0) {
  require_same_grid(a.grid, b.grid, "commutator_probe_op");
  CommutatorResult res;
  // Degree-0 check on a sample of modes: A(2 xi) = A(xi).
  int checked = 0;
  for_each_mode(a.grid, [&](std::size_t, const Mode& md) {
    if (md.rho == 0.0 || checked > 64 || md.nyquist_any) return;
    Mode m2 = md;
    for (int c = 0; c < 3; ++c) {
      m2.xi[c] *= 2;
      m2.xid[c] *= 2;
    }
    m2.rho *= 2;
    m2.rhod *= 2;
    cplx v1 = A(md), v2 = A(m2);
    if (std::abs(v1 - v2) > 1e-9 * (1.0 + std::abs(v1))) res.order_zero = false;
    ++checked;
  });
  MultiplierOptions opts;
  opts.zero_mode_value = 0.0;
  auto lowA = [&](const SpectralField& s) {
    SpectralField t = apply_multiplier(s, A, opts);
    return lp_low(t, part, k0);
  };
  SpectralField tab = transform(paraproduct_T(a, b, part));
  RealField first = inverse(lowA(tab));
  RealField second = paraproduct_T(a, lowA(b), part);
  res.value = RealField(a.grid, 1);
  for (std::size_t i = 0; i < first.data.size(); ++i) res.value.data[i] = first.data[i] - second.data[i];
  return res;
}

}  // namespace cnslab
