#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cnslab/core.hpp"

namespace cnslab {

struct LameParams {
  double mu = 1.0;
  double lambda2 = -1.0;
  double pressure_slope = 1.0;  // gamma = P'(1)
  double nu() const { return 2.0 * mu + lambda2; }
  void validate() const;
};

struct EigenPair {
  double rho = 0;
  cplx lam_plus, lam_minus;
};

// lam_pm = -nu rho^2/2 +- (1/2) sqrt(nu^2 rho^4 - 4 gamma rho^2); sqrt of a
// negative real is +i sqrt|.|. In the real regime lam_plus is computed from
// the product lam_plus * lam_minus = gamma rho^2 to avoid cancellation.
EigenPair eigenvalues(double rho, const LameParams& prm = {});

// Stiffest linear rate at radius rho (the eigenvalue of largest modulus).
double stiff_rate(double rho, const LameParams& prm = {});

enum class PhiKind { Exp, Phi1, Phi2 };

cplx phi_value(PhiKind kind, cplx z);
// n-th derivative at a real point c <= 0.
double phi_derivative(PhiKind kind, int n, double c);

// f(h (M + shift I)) for the potential block M = [[0, -i rho], [-i gamma rho, -nu rho^2]]
// acting on (a, v = xi.u/|xi|), stored as real coefficients:
//   a' = aa a - i av v,   v' = -i va a + vv v,
// plus the solenoidal scalar sol = f(h(-mu rho^2 + shift)).
struct BlockCoeffs {
  double aa = 1, av = 0, va = 0, vv = 1, sol = 1;
};

enum class Evaluation { Auto, Direct, Series };

BlockCoeffs block_function(double rho, double h, const LameParams& prm, PhiKind kind, double shift = 0.0,
                           Evaluation ev = Evaluation::Auto);

// Divided differences of the symbol display.
struct GreenDD {
  double D1 = 1, D2 = 0, D3 = 1;
};
GreenDD green_divided_differences(double rho, double t, const LameParams& prm = {}, Evaluation ev = Evaluation::Auto);

// (1+d)x(1+d) row-major symbol for a frequency vector (first d entries used).
std::vector<cplx> green_symbol(const std::array<double, 3>& xi, int d, double t, const LameParams& prm = {});

struct SpectralState {
  double t = 0;
  SpectralField a;  // scalar
  SpectralField u;  // vector (velocity or momentum)
};

SpectralState zero_state(const GridSpec& g);

// Per-mode coefficient table for one (grid, h, function); immutable after build.
class ModeTable {
 public:
  ModeTable() = default;
  ModeTable(const GridSpec& g, double h, const LameParams& prm, PhiKind kind, double shift = 0.0);
  const GridSpec& grid() const { return grid_; }
  const std::vector<BlockCoeffs>& coeffs() const { return c_; }

  // out = table * in (out may alias nothing); when accumulate, out += table * in.
  void apply(const SpectralField& a, const SpectralField& u, SpectralField& a_out, SpectralField& u_out,
             bool accumulate = false) const;

 private:
  GridSpec grid_;
  std::vector<BlockCoeffs> c_;
};

SpectralState apply_green(const SpectralState& s, double t, const LameParams& prm = {});

using Forcing = std::function<std::pair<SpectralField, SpectralField>(double t)>;

// Trapezoid-in-s Duhamel on a uniform grid of `steps` intervals; returns the
// states at every node.
std::vector<SpectralState> solve_linear_duhamel(const SpectralState& s0, const Forcing& forcing, double T, int steps,
                                                const LameParams& prm = {});

}  // namespace cnslab
