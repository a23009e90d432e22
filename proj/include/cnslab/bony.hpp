#pragma once

#include "cnslab/dyadic.hpp"
#include "cnslab/ops.hpp"

namespace cnslab {

// Physical-space dyadic pieces of a scalar field: mean plus one array per block.
struct BlockStack {
  double mean = 0;
  int kmin = 0;
  std::vector<RealField> blocks;  // index k - kmin

  const RealField& at(int k) const { return blocks[k - kmin]; }
};

BlockStack block_stack(const SpectralField& f, const DyadicPartition& part);

// T_f g = sum_j S_{j-1} f * Delta_j g, where S includes the mean of f.
RealField paraproduct_T(const SpectralField& f, const SpectralField& g, const DyadicPartition& part);
// R(f,g) = sum_j (sum_{|l-j|<=1} Delta_l f) * Delta_j g.
RealField remainder_R(const SpectralField& f, const SpectralField& g, const DyadicPartition& part);

struct BonyParts {
  RealField T_fg, T_gf, R;
};
// All three pieces from one pair of block stacks.
BonyParts bony_decomposition(const SpectralField& f, const SpectralField& g, const DyadicPartition& part);

// With the mean kept in S, T_f g + T_g f + R(f,g) = fg - mean(f) mean(g).
double bony_mean_correction(const SpectralField& f, const SpectralField& g);

struct CommutatorResult {
  RealField value;
  bool order_zero = true;  // false if A failed the degree-0 homogeneity check
};

// [S_{k0} A(D), T_a] b with A(0) := 0.
CommutatorResult commutator_probe_op(const SpectralField& a, const SpectralField& b, const ScalarSymbol& A,
                                     const DyadicPartition& part, int k0);

// Riesz transform component -i xi_j / |xi| on derivative wavenumbers.
ScalarSymbol riesz_symbol(int axis);

}  // namespace cnslab
