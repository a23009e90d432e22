#pragma once

#include <functional>

#include "cnslab/core.hpp"

namespace cnslab {

using ScalarSymbol = std::function<cplx(const Mode&)>;
// Matrix symbol: writes a components x components matrix (row-major) for a mode.
using MatrixSymbol = std::function<void(const Mode&, cplx* out)>;

struct MultiplierOptions {
  bool require_real = true;  // reject symbols that would break Hermitian symmetry
  bool zero_mode_supplied = true;
  cplx zero_mode_value = 1.0;  // m(0) used when the symbol is undefined at 0
};

// Pointwise product in frequency space. The symbol is evaluated on the full
// wavenumber; the zero mode takes opts.zero_mode_value.
SpectralField apply_multiplier(const SpectralField& sf, const ScalarSymbol& m, const MultiplierOptions& opts = {});
SpectralField apply_multiplier(const SpectralField& sf, const MatrixSymbol& m, const MultiplierOptions& opts = {});

enum class Projector { P, Q };
SpectralField leray_project(const SpectralField& u, Projector which);

// Spectral calculus on derivative wavenumbers.
SpectralField gradient(const SpectralField& scalar);           // d components
SpectralField divergence(const SpectralField& vec);            // scalar
SpectralField laplacian(const SpectralField& sf);              // componentwise
SpectralField lame(const SpectralField& u, double mu, double lambda2);  // mu Lap u + (mu+lambda) grad div u
SpectralField curl3(const SpectralField& u);
SpectralField inverse_neg_laplacian(const SpectralField& sf);  // zero mode -> 0
// Derivative d/dx_axis of every component.
SpectralField partial(const SpectralField& sf, int axis);

// 2/3-rule: keep modes with |m_i| < n/3 on every axis.
bool dealias_keep(const GridSpec& g, const Mode& md);
void dealias_inplace(SpectralField& sf);

// Elementwise helpers.
SpectralField add(const SpectralField& a, const SpectralField& b, double cb = 1.0);
SpectralField scaled(const SpectralField& a, double c);
SpectralField component(const SpectralField& sf, int c);
double max_abs(const RealField& f);
double max_abs(const SpectralField& f);
// Pointwise product of scalar fields in physical space.
RealField pointwise_product(const RealField& f, const RealField& g);

}  // namespace cnslab
