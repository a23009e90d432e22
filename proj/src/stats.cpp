#include "cnslab/stats.hpp"

#include <cmath>

#include "cnslab/core.hpp"

namespace cnslab {

double t_quantile_95(int dof) {
  static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                 2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086};
  if (dof <= 0) return 0.0;
  if (dof <= 20) return table[dof - 1];
  return 1.96 + 2.4 / dof;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error("fit_line: need at least two matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw Error("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_se = std::sqrt(ss / (n - 2) / sxx);
  }
  const double tq = t_quantile_95(static_cast<int>(n) - 2);
  f.ci_low = f.slope - tq * f.slope_se;
  f.ci_high = f.slope + tq * f.slope_se;
  return f;
}

}  // namespace cnslab
