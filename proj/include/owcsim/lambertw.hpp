#pragma once

// Principal branch of the Lambert W function on [-1/e, inf), via Halley
// iteration from a piecewise initial guess.

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace owcsim {

inline double lambert_w0(double x) {
  constexpr double inv_e = 0.367879441171442321595523770161;  // 1/e
  if (!(x >= -inv_e)) {
    // Tolerate rounding fuzz right at the branch point.
    if (x > -inv_e - 1e-15) return -1.0;
    throw std::domain_error("lambert_w0: argument below -1/e");
  }
  if (x == 0.0) return 0.0;

  double w;
  if (x < -0.25) {
    // Series around the branch point in p = sqrt(2 (e x + 1)).
    double p = std::sqrt(std::max(0.0, 2.0 * (std::exp(1.0) * x + 1.0)));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    // log1p-based guess, accurate enough near zero and through x ~ e.
    double l = std::log1p(x);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    // Asymptotic expansion for large arguments.
    double l1 = std::log(x);
    double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < 50; ++it) {
    double ew = std::exp(w);
    double f = w * ew - x;
    if (std::abs(f) <= 1e-13 * std::max(1.0, std::abs(x))) break;
    double wp1 = w + 1.0;
    // Halley step; the denominator stays away from zero for x > -1/e.
    double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    w -= f / denom;
    if (w < -1.0) w = -1.0 + 1e-14;  // keep on the principal branch
  }
  return w;
}

// W(exp(l)) without forming exp(l), usable when l would overflow the
// exponential. Solves w + log(w) = l by Newton for large l.
inline double lambert_w0_exp(double l) {
  if (l < 700.0) return lambert_w0(std::exp(l));
  double w = l - std::log(l);
  for (int it = 0; it < 50; ++it) {
    double step = (w + std::log(w) - l) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-15 * w) break;
  }
  return w;
}

}  // namespace owcsim
