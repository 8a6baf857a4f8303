#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpgame/belief_motion.hpp"
#include "mpgame/belief_payoff.hpp"
#include "mpgame/equilibrium.hpp"
#include "mpgame/signal.hpp"

namespace mpgame {

enum class Scheme { kContinuous, kDiscrete };
enum class DynamicsMode { kRealized, kExpected };
enum class ControlRefresh { kEveryStep, kPerEpoch };

struct SimConfig {
  Scheme scheme = Scheme::kContinuous;
  double dt_signal = 0.02;
  double h_ode = 0.002;
  double horizon = 10.0;
  DynamicsMode dynamics = DynamicsMode::kRealized;
  bool clamp_controls = false;
  ControlRefresh refresh = ControlRefresh::kEveryStep;
  VariancePropagation kalman_variance = VariancePropagation::kClosedForm;
};

void validate(const SimConfig& cfg);

// Initial beliefs: Normal-Gamma prior over the ecological factor and one
// Kalman prior per player type.
struct BeliefPriors {
  double mu0 = 0.0;
  double kappa0 = 1.0;
  double alpha0 = 2.0;
  double beta0 = 1.0;
  std::vector<double> tau0;
  std::vector<double> P0;
  std::vector<double> R;
};

void validate(const BeliefPriors& priors, int n);

// True law of the signals: x ~ N(mu, sigma^2), y_i = tau_i + N(0, R_i).
struct SignalLaw {
  double mu = 0.5;
  double sigma = 0.1;
  std::vector<double> R;
};

struct SignalSet {
  SignalTrace ecological;
  std::vector<SignalTrace> cost;  // cost[i] carries signals about player i
};

SignalSet generate_signals(const GameParams& p, const SignalLaw& law, double dt, double horizon,
                           std::uint64_t seed);

SignalSet subsample(const SignalSet& signals, std::size_t m);

struct Trajectory {
  std::vector<double> grid;
  std::vector<double> S;
  std::vector<double> x_real;
  std::vector<double> x_bar;
  std::vector<double> var_mu;  // NaN where alpha <= 1
  std::vector<double> kappa;
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<std::vector<double>> tau_bar;  // [player][grid index]
  std::vector<std::vector<double>> P;
  std::vector<std::vector<double>> u;

  std::size_t size() const { return grid.size(); }
  int players() const { return static_cast<int>(u.size()); }
};

// Integrates stock, beliefs and equilibrium controls on the h_ode grid.
// Continuous scheme: one RK4 on (S, mu_hat, beta, tau_bar, P) with controls
// re-solved at every stage. Discrete scheme: beliefs jump at signal epochs
// and are held in between; the stock is still RK4-integrated.
Trajectory simulate(const GameParams& p, const BeliefPriors& priors, const SimConfig& cfg,
                    const SignalSet& signals);

struct SchemeGap {
  double dt = 0.0;
  double x_bar = 0.0;
  double tau_bar = 0.0;  // max over players
  double u = 0.0;        // max over players
  double S = 0.0;
  double kappa = 0.0;
  double alpha = 0.0;
};

// Runs both schemes for each dt on signals subsampled from one trace at the
// finest dt, and reports sup-norm gaps at the signal epochs of that dt.
std::vector<SchemeGap> compare_schemes(const GameParams& p, const BeliefPriors& priors,
                                       const SimConfig& cfg, const SignalLaw& law,
                                       std::vector<double> dt_list, std::uint64_t seed);

struct WindowMetrics {
  double t_lo = 0.0;
  double t_hi = 0.0;
  double x_bar_error = 0.0;    // sup |x_bar - mu|
  double tau_bar_error = 0.0;  // sup_i sup |tau_bar_i - tau_i|
  double var_mu = 0.0;         // sup var_mu
  double P = 0.0;              // sup_i sup P_i
  double control_gap = 0.0;    // sup_i sup |u_i - u_i^known|
};

WindowMetrics window_metrics(const Trajectory& traj, const GameParams& p, double mu_true,
                             double t_lo, double t_hi);

// Metrics over the last tail_fraction of the horizon.
WindowMetrics convergence_diagnostics(const Trajectory& traj, const GameParams& p, double mu_true,
                                      double tail_fraction);

struct PayoffEstimate {
  double value = 0.0;
  double tail_bound = 0.0;  // e^{-rho T} C / rho
};

// Trapezoid quadrature of e^{-rho t} [u_i (a_i - sum_j u_j) - tau_i S] on
// [0, T_trunc] over the trajectory grid.
PayoffEstimate discounted_payoff(const Trajectory& traj, const GameParams& p, int player,
                                 double t_trunc);

// Fills realized_min_controls from a simulated trajectory.
NonnegativityReport check_nonnegativity(const GameParams& p, const TypeBounds& bounds,
                                        const Trajectory& traj);

}  // namespace mpgame
