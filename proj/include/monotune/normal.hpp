#pragma once

#include <cmath>
#include <numbers>

namespace monotune::normal {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684758586311649;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297364056176398613974736378;

inline double pdf(double z) noexcept { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

inline double cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

namespace detail {

// Mills ratio (1 - Phi(t)) / phi(t) for t >= 6 by Lentz's continued fraction
//   R(t) = 1 / (t + 1 / (t + 2 / (t + 3 / (t + ...)))).
inline double mills_ratio_tail(double t) noexcept {
  constexpr double tiny = 1e-300;
  double f = t;
  double c = t;
  double d = 0.0;
  for (int k = 1; k < 200; ++k) {
    d = t + k * d;
    d = (std::abs(d) < tiny) ? tiny : d;
    c = t + k / c;
    c = (std::abs(c) < tiny) ? tiny : c;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 / f;
}

inline constexpr double kTailSwitch = -6.0;

}  // namespace detail

/// log Phi(z), accurate far into the lower tail.
inline double log_cdf(double z) noexcept {
  if (z < detail::kTailSwitch) {
    return -0.5 * z * z - kLogSqrt2Pi + std::log(detail::mills_ratio_tail(-z));
  }
  if (z > 6.0) return std::log1p(-cdf(-z));
  return std::log(cdf(z));
}

/// Gaussian hazard phi(z) / Phi(z); finite for every finite z.
inline double hazard(double z) noexcept {
  if (z < detail::kTailSwitch) return 1.0 / detail::mills_ratio_tail(-z);
  return pdf(z) / cdf(z);
}

}  // namespace monotune::normal
