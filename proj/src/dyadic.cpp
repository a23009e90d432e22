#include "cnslab/dyadic.hpp"

#include <string>

namespace cnslab {

double smooth_step(double x) {
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  double a = std::exp(-1.0 / x);
  double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double eta(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 1.01) return 0.0;
  return smooth_step((1.01 - r) / 0.01);
}

double psi(double r) { return eta(0.5 * r) - eta(r); }

DyadicPartition::DyadicPartition(const GridSpec& g) : DyadicPartition(g, g.k_max() - 3) {}

DyadicPartition::DyadicPartition(const GridSpec& g, int k0) : grid_(g), kmin_(g.k_min()), kmax_(g.k_max()), k0_(k0) {
  g.validate();
  if (k0 <= kmin_ || k0 >= kmax_)
    throw Error("partition: k0 = " + std::to_string(k0) + " must lie strictly inside (" + std::to_string(kmin_) +
                ", " + std::to_string(kmax_) + ")");
}

void DyadicPartition::check_block(int k) const {
  if (k < kmin_ || k > kmax_)
    throw Error("partition: block " + std::to_string(k) + " outside [" + std::to_string(kmin_) + ", " +
                std::to_string(kmax_) + "]");
}

double DyadicPartition::block(int k, double rho) const {
  if (rho == 0.0) return 0.0;
  const double lo = std::ldexp(rho, -k);  // rho / 2^k
  if (k == kmin_ && k == kmax_) return 1.0;
  if (k == kmin_) return eta(0.5 * lo);
  if (k == kmax_) return 1.0 - eta(lo);
  return eta(0.5 * lo) - eta(lo);
}

double DyadicPartition::low(int j, double rho) const {
  if (rho == 0.0) return 1.0;
  if (j <= kmin_) return 0.0;
  if (j > kmax_) return 1.0;
  return eta(std::ldexp(rho, -j));
}

double DyadicPartition::fat_block(int k, double rho) const {
  double s = 0;
  for (int l = k - 1; l <= k + 1; ++l)
    if (l >= kmin_ && l <= kmax_) s += block(l, rho);
  return s;
}

std::pair<int, int> DyadicPartition::low_range() const { return {kmin_, k0_}; }
std::pair<int, int> DyadicPartition::high_range() const { return {k0_ - 1, kmax_}; }

namespace {

template <class W>
SpectralField radial_apply(const SpectralField& sf, W&& w) {
  SpectralField out(sf.grid, sf.components);
  const std::size_t m = sf.grid.modes();
  for_each_mode(sf.grid, [&](std::size_t i, const Mode& md) {
    const double v = w(md.rho);
    for (int c = 0; c < sf.components; ++c) out.data[c * m + i] = v * sf.data[c * m + i];
  });
  return out;
}

}  // namespace

SpectralField lp_block(const SpectralField& sf, const DyadicPartition& part, int k) {
  require_same_grid(sf.grid, part.grid(), "lp_block");
  part.check_block(k);
  return radial_apply(sf, [&](double r) { return part.block(k, r); });
}

SpectralField lp_low(const SpectralField& sf, const DyadicPartition& part, int j) {
  require_same_grid(sf.grid, part.grid(), "lp_low");
  if (j < part.k_min() || j > part.k_max() + 1)
    throw Error("lp_low: level " + std::to_string(j) + " outside the representable range");
  return radial_apply(sf, [&](double r) { return part.low(j, r); });
}

SpectralField lp_fat_block(const SpectralField& sf, const DyadicPartition& part, int k) {
  require_same_grid(sf.grid, part.grid(), "lp_fat_block");
  part.check_block(k);
  return radial_apply(sf, [&](double r) { return part.fat_block(k, r); });
}

std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& sf, const DyadicPartition& part) {
  return split_low_high(sf, part, part.k0());
}

std::pair<SpectralField, SpectralField> split_low_high(const SpectralField& sf, const DyadicPartition& part, int k0) {
  require_same_grid(sf.grid, part.grid(), "split_low_high");
  if (k0 <= part.k_min() || k0 >= part.k_max()) throw Error("split_low_high: k0 outside (k_min, k_max)");
  SpectralField lo = radial_apply(sf, [&](double r) { return part.low(k0, r); });
  SpectralField hi(sf.grid, sf.components);
  for (std::size_t i = 0; i < sf.data.size(); ++i) hi.data[i] = sf.data[i] - lo.data[i];
  return {std::move(lo), std::move(hi)};
}

}  // namespace cnslab
