#pragma once

#include "mpgame/signal.hpp"

namespace mpgame {

// Normal-Gamma belief over the unknown ecological mean and precision.
// Under continuous updating kappa and alpha are affine in elapsed time:
// kappa(t) = kappa0 + t, alpha(t) = alpha0 + t/2.
struct NormalGammaBelief {
  double mu_hat = 0.0;
  double kappa = 1.0;
  double alpha = 2.0;
  double beta = 1.0;
  double t = 0.0;
};

struct NormalGammaRate {
  double mu_hat = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

// Throws kNonFinite / kInvalidArgument when the belief cannot be advanced.
void validate(const NormalGammaBelief& b);

// Right-hand side of the continuous updating ODEs for a signal value x:
//   mu' = (x - mu)/(kappa + 1),  kappa' = 1,  alpha' = 1/2,
//   beta' = kappa (x - mu)^2 / (2 (kappa + 1)).
NormalGammaRate belief_derivative(const NormalGammaBelief& b, double x);

// Advances b over [b.t, b.t + duration] reading the zero-order-hold signal.
// mu_hat and beta use fixed-step RK4; kappa and alpha are advanced exactly.
// h must divide both duration and signal.dt.
NormalGammaBelief integrate_continuous(const NormalGammaBelief& b, const SignalTrace& signal,
                                       double duration, double h);

// Explicit Euler step of belief_derivative scaled by dt. With dt = 1 this is
// the single-observation conjugate Normal-Gamma update.
NormalGammaBelief step_discrete(const NormalGammaBelief& b, double x, double dt);

// beta / (kappa (alpha - 1)); the posterior variance of the mean estimate.
// Throws kInvalidArgument when alpha <= 1.
double estimator_variance(const NormalGammaBelief& b);

// (integral_0^t x(s) ds + mu0 kappa0) / (kappa0 + t + 1), with the integral
// taken exactly over the step-held trace.
double closed_form_mean(const SignalTrace& trace, double mu0, double kappa0, double t);

// Exact integral of a step-held trace over [t0, t].
double hold_integral(const SignalTrace& trace, double t);

}  // namespace mpgame
