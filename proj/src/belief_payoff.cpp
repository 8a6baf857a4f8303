#include "mpgame/belief_payoff.hpp"

#include <Eigen/Core>
#include <cmath>

#include "mpgame/error.hpp"
#include "mpgame/ode.hpp"

namespace mpgame {

void validate(const KalmanBelief& b) {
  require(std::isfinite(b.tau_hat) && std::isfinite(b.P) && std::isfinite(b.R) &&
              std::isfinite(b.t),
          ErrorKind::kNonFinite, "non-finite Kalman belief state");
  require(b.P > 0.0, ErrorKind::kInvalidArgument, "Kalman variance P must be > 0");
  require(b.R > 0.0, ErrorKind::kInvalidArgument, "Kalman noise variance R must be > 0");
}

KalmanRate kalman_derivative(const KalmanBelief& b, double y) {
  validate(b);
  require(std::isfinite(y), ErrorKind::kNonFinite, "non-finite cost signal value");
  return {(b.P / b.R) * (y - b.tau_hat), -(b.P * b.P) / b.R};
}

double kalman_variance_closed_form(double P0, double R, double t) {
  return P0 * R / (t * P0 + R);
}

KalmanBelief integrate_kalman(const KalmanBelief& b, const SignalTrace& signal, double duration,
                              double h, VariancePropagation variance) {
  validate(b);
  const std::size_t steps = exact_ratio(duration, h, "integrate_kalman duration");
  const std::size_t per_hold = exact_ratio(signal.dt, h, "integrate_kalman hold interval");
  require(b.t >= signal.t0 - 1e-12, ErrorKind::kCoverage, "integrate_kalman: starts before trace");
  const std::size_t first =
      exact_ratio(std::max(0.0, b.t - signal.t0), h, "integrate_kalman start time");
  require(first + steps <= signal.size() * per_hold, ErrorKind::kCoverage,
          "signal trace '" + signal.label + "' does not cover the integration window");

  const double P0 = b.P;
  const double R = b.R;
  const bool exact_p = variance == VariancePropagation::kClosedForm;
  Eigen::Vector2d state(b.tau_hat, b.P);
  for (std::size_t s = 0; s < steps; ++s) {
    const double y = signal.values[(first + s) / per_hold];
    require(std::isfinite(y), ErrorKind::kNonFinite, "non-finite cost signal value");
    const double elapsed = static_cast<double>(s) * h;
    const auto rhs = [&](double local, const Eigen::Vector2d& v) {
      const double p = exact_p ? kalman_variance_closed_form(P0, R, elapsed + local) : v[1];
      return Eigen::Vector2d((p / R) * (y - v[0]), -(p * p) / R);
    };
    state = rk4_step(state, 0.0, h, rhs);
    if (exact_p) state[1] = kalman_variance_closed_form(P0, R, elapsed + h);
    require(state.allFinite() && state[1] > 0.0, ErrorKind::kNonFinite,
            "Kalman belief became non-finite or non-positive during integration");
  }
  return {state[0], state[1], R, b.t + duration};
}

KalmanBelief step_discrete_kalman(const KalmanBelief& b, double y, double dt) {
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::kInvalidArgument,
          "discrete step dt must be > 0");
  const KalmanRate rate = kalman_derivative(b, y);
  KalmanBelief out{b.tau_hat + dt * rate.tau_hat, b.P + dt * rate.P, b.R, b.t + dt};
  require(out.P > 0.0, ErrorKind::kInvalidArgument,
          "discrete Kalman step drives P non-positive; reduce dt (need dt*P/R < 1)");
  return out;
}

}  // namespace mpgame
