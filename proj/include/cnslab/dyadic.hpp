#pragma once

#include <utility>

#include "cnslab/core.hpp"

namespace cnslab {

// Smooth step: 0 for x <= 0, 1 for x >= 1, C-infinity in between.
double smooth_step(double x);

// Radial cutoff: 1 on [0,1], 0 beyond 1.01, nonincreasing.
double eta(double r);

// psi(r) = eta(r/2) - eta(r), supported in (1, 2.02].
double psi(double r);

class DyadicPartition {
 public:
  explicit DyadicPartition(const GridSpec& g);
  DyadicPartition(const GridSpec& g, int k0);

  const GridSpec& grid() const { return grid_; }
  int k_min() const { return kmin_; }
  int k_max() const { return kmax_; }
  int k0() const { return k0_; }
  int blocks() const { return kmax_ - kmin_ + 1; }

  // Multiplier of the block k at radius rho; the zero mode maps to 0 and the
  // edge blocks absorb the tails so the weights sum to exactly 1.
  double block(int k, double rho) const;
  // Multiplier of S_j = mean + sum_{k<j} Delta_k.
  double low(int j, double rho) const;
  // Multiplier of the fattened block sum_{|l-k|<=1} Delta_l.
  double fat_block(int k, double rho) const;

  // Blocks that can be nonzero on the low / high part of the split at k0.
  std::pair<int, int> low_range() const;
  std::pair<int, int> high_range() const;

  void check_block(int k) const;

 private:
  GridSpec grid_;
  int kmin_, kmax_, k0_;
};

SpectralField lp_block(const SpectralField& sf, const DyadicPartition& part, int k);
SpectralField lp_low(const SpectralField& sf, const DyadicPartition& part, int j);
SpectralField lp_fat_block(const SpectralField& sf, const DyadicPartition& part, int k);
std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& sf, const DyadicPartition& part);
std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& sf, const DyadicPartition& part, int k0);

}  // namespace cnslab
