#pragma once

#include "mpgame/signal.hpp"

namespace mpgame {

// Scalar Kalman estimate of a constant opponent cost type.
struct KalmanBelief {
  double tau_hat = 0.0;
  double P = 1.0;  // estimation error variance
  double R = 1.0;  // measurement noise variance
  double t = 0.0;
};

struct KalmanRate {
  double tau_hat = 0.0;
  double P = 0.0;
};

enum class VariancePropagation {
  kClosedForm,  // P(t) = P0 R / ((t - t_start) P0 + R)
  kOde,         // RK4 on P' = -P^2/R alongside tau_hat
};

void validate(const KalmanBelief& b);

// tau' = (P/R)(y - tau),  P' = -P^2/R.
KalmanRate kalman_derivative(const KalmanBelief& b, double y);

// Same stepping contract as integrate_continuous for the Normal-Gamma belief.
KalmanBelief integrate_kalman(const KalmanBelief& b, const SignalTrace& signal, double duration,
                              double h,
                              VariancePropagation variance = VariancePropagation::kClosedForm);

// Explicit Euler step of kalman_derivative scaled by dt. Throws when the step
// would drive P non-positive (dt P / R >= 1).
KalmanBelief step_discrete_kalman(const KalmanBelief& b, double y, double dt);

// P0 R / (t P0 + R).
double kalman_variance_closed_form(double P0, double R, double t);

}  // namespace mpgame
