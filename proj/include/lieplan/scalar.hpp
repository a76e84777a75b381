#pragma once

#include <cmath>
#include <numbers>

namespace lieplan {

inline constexpr double kPi = std::numbers::pi;

/// Quadrant-aware arctangent of y/x for the point (x, y), valued in (-pi, pi].
/// Argument order is (x, y); atan2c(0, 0) == 0 for either sign of zero.
inline double atan2c(double x, double y) {
  if (x == 0.0 && y == 0.0) return 0.0;
  const double r = std::atan2(y, x);
  return r == -kPi ? kPi : r;
}

/// sign(0) == 0.
inline double sign(double x) {
  return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
}

/// Characteristic function of the open half-line (-inf, 0).
inline double indicator_negative(double x) { return x < 0.0 ? 1.0 : 0.0; }

/// Canonical representative of an angle in (-pi, pi].
inline double wrap_angle(double theta) {
  double r = std::remainder(theta, 2.0 * kPi);
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

// sin(a)/a and (1-cos(a))/a, switching to 4-term Taylor series below this |a|.
// 1 - cos(a) is evaluated as 2 sin^2(a/2) to avoid cancellation near the switch.
inline constexpr double kSmallAngle = 1e-4;

inline double sinc(double a) {
  if (std::abs(a) < kSmallAngle) {
    const double a2 = a * a;
    return 1.0 - a2 / 6.0 + a2 * a2 / 120.0 - a2 * a2 * a2 / 5040.0;
  }
  return std::sin(a) / a;
}

inline double cosc(double a) {
  if (std::abs(a) < kSmallAngle) {
    const double a2 = a * a;
    return a / 2.0 - a * a2 / 24.0 + a * a2 * a2 / 720.0 - a * a2 * a2 * a2 / 40320.0;
  }
  const double h = std::sin(0.5 * a);
  return 2.0 * h * h / a;
}

/// (1 - cos(a)) / a^2
inline double cosc2(double a) {
  if (std::abs(a) < kSmallAngle) {
    const double a2 = a * a;
    return 0.5 - a2 / 24.0 + a2 * a2 / 720.0 - a2 * a2 * a2 / 40320.0;
  }
  const double h = std::sin(0.5 * a);
  return 2.0 * h * h / (a * a);
}

}  // namespace lieplan
