#include "cnslab/core.hpp"

#include <algorithm>
#include <sstream>

namespace cnslab {

void GridSpec::validate() const {
  if (d < 1 || d > 3) throw Error("grid: d must be 1, 2 or 3");
  if (n < 8 || (n & (n - 1)) != 0) throw Error("grid: n must be a power of two with n >= 8");
  if (!(L > 0) || !std::isfinite(L)) throw Error("grid: domain length must be positive");
  if (k_max() - k_min() < 4) {
    std::ostringstream os;
    os << "grid: representable dyadic range [" << k_min() << ", " << k_max()
       << "] is narrower than 4 blocks";
    throw Error(os.str());
  }
}

std::size_t GridSpec::points() const {
  std::size_t p = 1;
  for (int a = 0; a < d; ++a) p *= static_cast<std::size_t>(n);
  return p;
}

std::size_t GridSpec::modes() const {
  std::size_t p = static_cast<std::size_t>(half());
  for (int a = 1; a < d; ++a) p *= static_cast<std::size_t>(n);
  return p;
}

double GridSpec::cell_volume() const { return std::pow(L / n, d); }
double GridSpec::volume() const { return std::pow(L, d); }

int GridSpec::k_min() const { return static_cast<int>(std::ceil(std::log2(2.0 * kPi / L) - 1e-12)); }
int GridSpec::k_max() const { return static_cast<int>(std::floor(std::log2(kPi * n / L) + 1e-12)); }

std::string GridSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "d=" << d << " n=" << n << " L=" << L;
  return os.str();
}

RealField::RealField(const GridSpec& g, int comps) : grid(g), components(comps), data(g.points() * comps, 0.0) {}

SpectralField::SpectralField(const GridSpec& g, int comps)
    : grid(g), components(comps), data(g.modes() * comps, cplx(0.0, 0.0)) {}

std::size_t mode_index(const GridSpec& g, const std::array<int, 3>& m) {
  const int n = g.n;
  auto wrap = [n](int v) { return ((v % n) + n) % n; };
  int last = m[g.d - 1];
  if (last < 0 || last > n / 2) return npos;
  for (int a = 0; a < g.d - 1; ++a)
    if (m[a] < -n / 2 || m[a] > n / 2) return npos;
  std::size_t idx = 0;
  for (int a = 0; a < g.d - 1; ++a) idx = idx * n + wrap(m[a]);
  return idx * g.half() + last;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
  if (a != b) throw Error(std::string(where) + ": grid mismatch (" + a.describe() + " vs " + b.describe() + ")");
}

void require_finite(const RealField& f, const char* where) {
  for (double v : f.data)
    if (!std::isfinite(v)) throw Error(std::string(where) + ": non-finite sample");
}

void require_finite(const SpectralField& f, const char* where) {
  for (const cplx& v : f.data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw Error(std::string(where) + ": non-finite coefficient");
}

double hermitian_defect(const SpectralField& f) {
  const GridSpec& g = f.grid;
  const int n = g.n;
  double num = 0, den = 0;
  for (int c = 0; c < f.components; ++c) {
    const cplx* p = f.comp(c);
    for_each_mode(g, [&](std::size_t idx, const Mode& md) {
      den = std::max(den, std::abs(p[idx]));
      int last = md.m[g.d - 1];
      if (last != 0 && last != n / 2) return;
      std::array<int, 3> partner{0, 0, 0};
      for (int a = 0; a < g.d - 1; ++a) partner[a] = (md.m[a] == n / 2) ? n / 2 : -md.m[a];
      partner[g.d - 1] = last;
      std::size_t j = mode_index(g, partner);
      num = std::max(num, std::abs(p[idx] - std::conj(p[j])));
    });
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace cnslab
