#include "cnslab/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace cnslab {
namespace {

struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

const PlanPair& plans_for(const GridSpec& g) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(g.d, g.n);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  int dims[3] = {g.n, g.n, g.n};
  AlignedVector<double> r(g.points());
  AlignedVector<cplx> c(g.modes());
  auto* cc = reinterpret_cast<fftw_complex*>(c.data());
  PlanPair pp;
  // 1-d component offsets are not 64-byte multiples.
  const unsigned flags = FFTW_ESTIMATE | (g.d == 1 ? FFTW_UNALIGNED : 0u);
  pp.fwd = fftw_plan_dft_r2c(g.d, dims, r.data(), cc, flags);
  pp.bwd = fftw_plan_dft_c2r(g.d, dims, cc, r.data(), flags);
  if (!pp.fwd || !pp.bwd) throw Error("fft: plan creation failed");
  return cache.emplace(key, pp).first->second;
}

AlignedVector<cplx>& scratch(std::size_t n) {
  thread_local AlignedVector<cplx> buf;
  if (buf.size() < n) buf.resize(n);
  return buf;
}

}  // namespace

void forward_component(const GridSpec& g, const double* in, cplx* out) {
  const PlanPair& pp = plans_for(g);
  fftw_execute_dft_r2c(pp.fwd, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  const double s = 1.0 / static_cast<double>(g.points());
  const std::size_t m = g.modes();
  for (std::size_t i = 0; i < m; ++i) out[i] *= s;
}

void inverse_component(const GridSpec& g, const cplx* in, double* out) {
  const PlanPair& pp = plans_for(g);
  auto& buf = scratch(g.modes());
  std::copy(in, in + g.modes(), buf.begin());
  fftw_execute_dft_c2r(pp.bwd, reinterpret_cast<fftw_complex*>(buf.data()), out);
}

SpectralField transform(const RealField& f) {
  require_finite(f, "transform");
  SpectralField out(f.grid, f.components);
  for (int c = 0; c < f.components; ++c) forward_component(f.grid, f.comp(c), out.comp(c));
  return out;
}

RealField inverse(const SpectralField& sf) {
  RealField out(sf.grid, sf.components);
  for (int c = 0; c < sf.components; ++c) inverse_component(sf.grid, sf.comp(c), out.comp(c));
  return out;
}

double spectral_energy(const SpectralField& sf, int comp) {
  const cplx* p = sf.comp(comp);
  double s = 0;
  for_each_mode(sf.grid, [&](std::size_t i, const Mode& md) { s += md.weight * std::norm(p[i]); });
  return s * sf.grid.volume();
}

}  // namespace cnslab
