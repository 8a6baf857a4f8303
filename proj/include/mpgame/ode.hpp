#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "mpgame/error.hpp"

namespace mpgame {

// Classical fourth-order Runge-Kutta step. State must support +, and scalar *.
template <typename State, typename Rhs>
State rk4_step(const State& y, double t, double h, Rhs&& rhs) {
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + 0.5 * h, y + (0.5 * h) * k1);
  const State k3 = rhs(t + 0.5 * h, y + (0.5 * h) * k2);
  const State k4 = rhs(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Returns round(numerator / denominator) when it is an integer up to
// round-off, otherwise throws with the given description.
inline std::size_t exact_ratio(double numerator, double denominator, const std::string& what) {
  if (!(std::isfinite(numerator) && std::isfinite(denominator) && denominator > 0.0)) {
    fail(ErrorKind::kInvalidArgument, what + ": non-finite or non-positive step");
  }
  const double q = numerator / denominator;
  const double r = std::round(q);
  if (!(r >= 0.0 && std::abs(q - r) <= 1e-9 * std::max(1.0, r))) {
    fail(ErrorKind::kInvalidArgument, what + ": " + std::to_string(denominator) +
                                          " does not divide " + std::to_string(numerator));
  }
  return static_cast<std::size_t>(r);
}

}  // namespace mpgame
