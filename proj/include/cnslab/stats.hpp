#pragma once

#include <vector>

namespace cnslab {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double slope_se = 0;
  double ci_low = 0;   // 95% t-interval on the slope
  double ci_high = 0;
};

// Ordinary least squares y = intercept + slope * x; needs >= 2 points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided 95% Student-t quantile for the given degrees of freedom.
double t_quantile_95(int dof);

}  // namespace cnslab
