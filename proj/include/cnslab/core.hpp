#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdlib>
#include <new>
#include <stdexcept>
#include <string>
#include <vector>

namespace cnslab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 64-byte aligned storage so every field buffer can be handed to FFTW plans
// created on aligned scratch arrays.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    if (n == 0) return nullptr;
    void* p = std::aligned_alloc(64, ((n * sizeof(T) + 63) / 64) * 64);
    if (!p) throw std::bad_alloc();
    return static_cast<T*>(p);
  }
  void deallocate(T* p, std::size_t) noexcept { std::free(p); }
  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

struct GridSpec {
  int d = 3;
  int n = 64;
  double L = 2.0 * kPi;

  void validate() const;
  std::size_t points() const;
  std::size_t modes() const;  // half-spectrum size
  int half() const { return n / 2 + 1; }
  double dk() const { return 2.0 * kPi / L; }
  double dx() const { return L / n; }
  double cell_volume() const;
  double volume() const;
  int k_min() const;
  int k_max() const;
  double nyquist() const { return kPi * n / L; }
  bool operator==(const GridSpec& o) const { return d == o.d && n == o.n && L == o.L; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
  std::string describe() const;
};

struct RealField {
  GridSpec grid;
  int components = 1;
  AlignedVector<double> data;

  RealField() = default;
  RealField(const GridSpec& g, int comps);
  double* comp(int c) { return data.data() + static_cast<std::size_t>(c) * grid.points(); }
  const double* comp(int c) const { return data.data() + static_cast<std::size_t>(c) * grid.points(); }
  std::size_t size() const { return data.size(); }
};

struct SpectralField {
  GridSpec grid;
  int components = 1;
  AlignedVector<cplx> data;

  SpectralField() = default;
  SpectralField(const GridSpec& g, int comps);
  cplx* comp(int c) { return data.data() + static_cast<std::size_t>(c) * grid.modes(); }
  const cplx* comp(int c) const { return data.data() + static_cast<std::size_t>(c) * grid.modes(); }
  std::size_t size() const { return data.size(); }
};

// Per-mode frequency data for the half-spectrum layout. xi is the full signed
// wavenumber (Nyquist taken as +n/2); xid zeroes Nyquist components and is the
// wavenumber used by every odd-order operator.
struct Mode {
  std::array<int, 3> m{0, 0, 0};
  std::array<double, 3> xi{0, 0, 0};
  std::array<double, 3> xid{0, 0, 0};
  double rho = 0;   // |xi|
  double rhod = 0;  // |xid|
  double weight = 1;  // multiplicity in Parseval sums (1 or 2)
  bool nyquist_any = false;
};

// Calls fn(index, mode) for every stored mode in storage order.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
  const int n = g.n, h = g.half();
  const double dk = g.dk();
  Mode md;
  auto axis = [&](int i, int ax, bool halfaxis) {
    int m = halfaxis ? i : (i <= n / 2 ? i : i - n);
    md.m[ax] = m;
    md.xi[ax] = dk * m;
    bool nyq = (std::abs(m) == n / 2);
    md.xid[ax] = nyq ? 0.0 : dk * m;
    return nyq;
  };
  auto finish = [&](int last) {
    double r2 = 0, rd2 = 0;
    for (int a = 0; a < g.d; ++a) {
      r2 += md.xi[a] * md.xi[a];
      rd2 += md.xid[a] * md.xid[a];
    }
    md.rho = std::sqrt(r2);
    md.rhod = std::sqrt(rd2);
    md.weight = (last == 0 || last == n / 2) ? 1.0 : 2.0;
  };
  std::size_t idx = 0;
  if (g.d == 1) {
    for (int i = 0; i < h; ++i, ++idx) {
      md.nyquist_any = axis(i, 0, true);
      finish(i);
      fn(idx, static_cast<const Mode&>(md));
    }
  } else if (g.d == 2) {
    for (int i = 0; i < n; ++i) {
      bool n0 = axis(i, 0, false);
      for (int j = 0; j < h; ++j, ++idx) {
        bool n1 = axis(j, 1, true);
        md.nyquist_any = n0 || n1;
        finish(j);
        fn(idx, static_cast<const Mode&>(md));
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      bool n0 = axis(i, 0, false);
      for (int j = 0; j < n; ++j) {
        bool n1 = axis(j, 1, false);
        for (int l = 0; l < h; ++l, ++idx) {
          bool n2 = axis(l, 2, true);
          md.nyquist_any = n0 || n1 || n2;
          finish(l);
          fn(idx, static_cast<const Mode&>(md));
        }
      }
    }
  }
}

// Index of the mode with signed integer wavenumbers m (last axis m >= 0 after
// conjugation is handled by the caller). Returns npos when not stored.
std::size_t mode_index(const GridSpec& g, const std::array<int, 3>& m);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);
void require_finite(const RealField& f, const char* where);
void require_finite(const SpectralField& f, const char* where);

// Relative defect of Hermitian symmetry on the self-conjugate planes.
double hermitian_defect(const SpectralField& f);

}  // namespace cnslab
