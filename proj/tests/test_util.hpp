#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

// Shared numeric helpers for the test suites.

namespace testutil {

// One-sided finite-difference derivative of order m (1..4) with O(h^4)
// truncation, forward from x (side=+1) or backward (side=-1).
inline double one_sided_derivative(const std::function<double(double)>& f, double x,
                                   double h, int m, int side) {
  static const double c1[] = {-25.0 / 12, 4.0, -3.0, 4.0 / 3, -1.0 / 4};
  static const double c2[] = {15.0 / 4, -77.0 / 6, 107.0 / 6, -13.0, 61.0 / 12,
                              -5.0 / 6};
  static const double c3[] = {-49.0 / 8, 29.0, -461.0 / 8, 62.0, -307.0 / 8, 13.0,
                              -15.0 / 8};
  static const double c4[] = {28.0 / 3, -111.0 / 2, 142.0, -1219.0 / 6, 176.0,
                              -185.0 / 2, 82.0 / 3, -7.0 / 2};
  const double* c;
  int n;
  switch (m) {
    case 1: c = c1; n = 5; break;
    case 2: c = c2; n = 6; break;
    case 3: c = c3; n = 7; break;
    case 4: c = c4; n = 8; break;
    default: throw std::invalid_argument("order 1..4 only");
  }
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += c[i] * f(x + side * i * h);
  double scale = std::pow(h, m);
  if (side < 0 && m % 2 == 1) scale = -scale;
  return acc / scale;
}

}  // namespace testutil
