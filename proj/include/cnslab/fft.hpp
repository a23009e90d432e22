#pragma once

#include "cnslab/core.hpp"

namespace cnslab {

// Forward coefficients are normalized: fhat = (1/N) sum f e^{-i xi x}, so the
// zero mode is the mean and the inverse is a plain sum.
SpectralField transform(const RealField& f);
RealField inverse(const SpectralField& sf);

// Raw single-component transforms on caller buffers (64-byte aligned).
void forward_component(const GridSpec& g, const double* in, cplx* out);
void inverse_component(const GridSpec& g, const cplx* in, double* out);

// Discrete Parseval sum  L^d * sum_modes weight*|fhat|^2  for one component.
double spectral_energy(const SpectralField& sf, int comp);

}  // namespace cnslab
