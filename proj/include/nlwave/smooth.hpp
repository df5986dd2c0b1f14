#pragma once

#include <cmath>

namespace nlwave {

// C-infinity step: 1 for x <= 1, 0 for x >= 2, strictly decreasing in between.
//   psi(x) = h(2 - x) / (h(2 - x) + h(x - 1)),  h(t) = exp(-1/t) for t > 0, else 0.
// Every derivative vanishes at x = 1 and x = 2.
inline double smooth_step(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  const double a = std::exp(-1.0 / (2.0 - x));
  const double b = std::exp(-1.0 / (x - 1.0));
  return a / (a + b);
}

// Bump exp(1 - 1/(1 - y^2)) on |y| < 1, zero outside; peak value 1 at y = 0.
inline double smooth_bump(double y) {
  const double q = 1.0 - y * y;
  if (q <= 0.0) return 0.0;
  return std::exp(1.0 - 1.0 / q);
}

}  // namespace nlwave
