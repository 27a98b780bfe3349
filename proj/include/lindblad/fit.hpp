#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "lindblad/complex_matrix.hpp"

namespace lindblad {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares power-law fit on (log x, log y).
struct ScalingFit {
  std::vector<double> xs;
  std::vector<double> ys;
  double slope = 0.0;
  double intercept = 0.0;   // of the log-log line
  double r_squared = 0.0;
  std::size_t points_used = 0;
};

inline LinearFit fit_linear(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidInputError("fit_linear: length mismatch");
  if (xs.size() < 2) throw InvalidInputError("fit_linear: need at least two points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidInputError("fit_linear: degenerate abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (syy == 0.0) {
    f.r_squared = 1.0;
  } else {
    f.r_squared = std::clamp((sxy * sxy) / (sxx * syy), 0.0, 1.0);
  }
  return f;
}

// Points with y <= 0 are dropped before taking logs; points_used records
// how many survived.
inline ScalingFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InvalidInputError("fit_power_law: length mismatch");
  ScalingFit fit;
  fit.xs = xs;
  fit.ys = ys;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw InvalidInputError("fit_power_law: abscissa must be positive");
    if (ys[i] > 0.0) {
      lx.push_back(std::log(xs[i]));
      ly.push_back(std::log(ys[i]));
    }
  }
  fit.points_used = lx.size();
  if (fit.points_used < 2) throw InvalidInputError("fit_power_law: fewer than two positive points");
  const LinearFit lf = fit_linear(lx, ly);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r_squared = lf.r_squared;
  return fit;
}

}  // namespace lindblad
