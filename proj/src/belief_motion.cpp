#include "mpgame/belief_motion.hpp"

#include <Eigen/Core>
#include <cmath>

#include "mpgame/error.hpp"
#include "mpgame/ode.hpp"

namespace mpgame {
namespace {

void check_finite_signal(double x) {
  require(std::isfinite(x), ErrorKind::kNonFinite, "non-finite ecological signal value");
}

// Integer step index of time s on a grid of spacing h anchored at t0.
std::size_t grid_index(double s, double t0, double h, const char* what) {
  if (s < t0 - 1e-12) fail(ErrorKind::kCoverage, std::string(what) + ": starts before trace");
  return exact_ratio(std::max(0.0, s - t0), h, what);
}

}  // namespace

void validate(const NormalGammaBelief& b) {
  require(std::isfinite(b.mu_hat) && std::isfinite(b.kappa) && std::isfinite(b.alpha) &&
              std::isfinite(b.beta) && std::isfinite(b.t),
          ErrorKind::kNonFinite, "non-finite Normal-Gamma belief state");
  require(b.kappa > 0.0, ErrorKind::kInvalidArgument, "belief kappa must be > 0");
  require(b.alpha > 0.0, ErrorKind::kInvalidArgument, "belief alpha must be > 0");
  require(b.beta >= 0.0, ErrorKind::kInvalidArgument, "belief beta must be >= 0");
}

NormalGammaRate belief_derivative(const NormalGammaBelief& b, double x) {
  validate(b);
  check_finite_signal(x);
  const double innovation = x - b.mu_hat;
  const double denom = b.kappa + 1.0;
  return {innovation / denom, 1.0, 0.5, b.kappa * innovation * innovation / (2.0 * denom)};
}

NormalGammaBelief integrate_continuous(const NormalGammaBelief& b, const SignalTrace& signal,
                                       double duration, double h) {
  validate(b);
  const std::size_t steps = exact_ratio(duration, h, "integrate_continuous duration");
  const std::size_t per_hold = exact_ratio(signal.dt, h, "integrate_continuous hold interval");
  const std::size_t first = grid_index(b.t, signal.t0, h, "integrate_continuous");
  require(first + steps <= signal.size() * per_hold, ErrorKind::kCoverage,
          "signal trace '" + signal.label + "' does not cover the integration window");

  // State (mu_hat, beta); kappa is known in closed form at every stage time.
  Eigen::Vector2d y(b.mu_hat, b.beta);
  for (std::size_t s = 0; s < steps; ++s) {
    const double x = signal.values[(first + s) / per_hold];
    check_finite_signal(x);
    const double kappa_start = b.kappa + static_cast<double>(s) * h;
    const auto rhs = [&](double local, const Eigen::Vector2d& v) {
      const double kappa = kappa_start + local;
      const double innovation = x - v[0];
      return Eigen::Vector2d(innovation / (kappa + 1.0),
                             kappa * innovation * innovation / (2.0 * (kappa + 1.0)));
    };
    y = rk4_step(y, 0.0, h, rhs);
    require(y.allFinite(), ErrorKind::kNonFinite,
            "belief became non-finite during continuous integration");
  }

  NormalGammaBelief out;
  out.mu_hat = y[0];
  out.beta = y[1];
  out.kappa = b.kappa + duration;
  out.alpha = b.alpha + 0.5 * duration;
  out.t = b.t + duration;
  return out;
}

NormalGammaBelief step_discrete(const NormalGammaBelief& b, double x, double dt) {
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::kInvalidArgument,
          "discrete step dt must be > 0");
  const NormalGammaRate rate = belief_derivative(b, x);
  NormalGammaBelief out;
  out.mu_hat = b.mu_hat + dt * rate.mu_hat;
  out.kappa = b.kappa + dt;
  out.alpha = b.alpha + 0.5 * dt;
  out.beta = b.beta + dt * rate.beta;
  out.t = b.t + dt;
  validate(out);
  return out;
}

double estimator_variance(const NormalGammaBelief& b) {
  validate(b);
  require(b.alpha > 1.0, ErrorKind::kInvalidArgument,
          "estimator variance undefined for alpha <= 1");
  return b.beta / (b.kappa * (b.alpha - 1.0));
}

double hold_integral(const SignalTrace& trace, double t) {
  require(!trace.values.empty(), ErrorKind::kCoverage, "empty signal trace");
  require(t >= trace.t0 && t <= trace.end_time(), ErrorKind::kCoverage,
          "integral upper limit outside trace coverage");
  if (t == trace.t0) return 0.0;
  const std::size_t n = trace.size();
  std::size_t full = (t >= trace.end_time()) ? n : hold_index(trace, t);
  double sum = 0.0;
  for (std::size_t k = 0; k < full; ++k) sum += trace.values[k];
  double integral = sum * trace.dt;
  if (full < n) {
    integral += (t - (trace.t0 + static_cast<double>(full) * trace.dt)) * trace.values[full];
  }
  return integral;
}

double closed_form_mean(const SignalTrace& trace, double mu0, double kappa0, double t) {
  require(trace.t0 == 0.0, ErrorKind::kCoverage, "closed-form mean needs a trace starting at 0");
  require(std::isfinite(mu0) && std::isfinite(kappa0) && kappa0 > 0.0,
          ErrorKind::kInvalidArgument, "closed-form mean needs finite mu0 and kappa0 > 0");
  return (hold_integral(trace, t) + mu0 * kappa0) / (kappa0 + t + 1.0);
}

}  // namespace mpgame
