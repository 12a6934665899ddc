#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace equivact {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double correlation = 0.0;  // Pearson r
};

inline LinearFit linear_fit(const std::vector<double>& x,
                            const std::vector<double>& y) {
  LinearFit fit;
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx > 0) {
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
  }
  if (sxx > 0 && syy > 0) fit.correlation = sxy / std::sqrt(sxx * syy);
  return fit;
}

}  // namespace equivact
