#include "mpgame/simulation.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mpgame/error.hpp"
#include "mpgame/ode.hpp"

namespace mpgame {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Grid {
  std::size_t steps = 0;     // ODE steps over the horizon
  std::size_t per_hold = 0;  // ODE steps per signal epoch
};

Grid make_grid(const SimConfig& cfg) {
  return {exact_ratio(cfg.horizon, cfg.h_ode, "horizon / h_ode"),
          exact_ratio(cfg.dt_signal, cfg.h_ode, "dt_signal / h_ode")};
}

void check_signals(const SignalSet& signals, const SimConfig& cfg, const Grid& grid, int n) {
  require(signals.cost.size() == static_cast<std::size_t>(n), ErrorKind::kInvalidArgument,
          "need one cost trace per player");
  const auto check = [&](const SignalTrace& tr) {
    require(std::abs(tr.dt - cfg.dt_signal) <= 1e-12 * cfg.dt_signal, ErrorKind::kInvalidArgument,
            "trace '" + tr.label + "' interval differs from dt_signal");
    require(tr.t0 == 0.0, ErrorKind::kCoverage, "trace '" + tr.label + "' must start at 0");
    require(tr.size() * grid.per_hold >= grid.steps, ErrorKind::kCoverage,
            "trace '" + tr.label + "' does not cover the horizon");
  };
  check(signals.ecological);
  for (const auto& tr : signals.cost) check(tr);
}

double variance_or_nan(double beta, double kappa, double alpha) {
  return alpha > 1.0 ? beta / (kappa * (alpha - 1.0)) : kNaN;
}

std::vector<double> equilibrium_controls(const GameParams& p, double x_bar,
                                         const std::vector<double>& tau_bar, bool clamp) {
  auto u = solve_equilibrium(p, BeliefProfile{x_bar, tau_bar}).controls;
  if (clamp) {
    for (double& v : u) v = std::max(v, 0.0);
  }
  return u;
}

double stock_rate(double S, double x_dyn, double delta, const std::vector<double>& u) {
  return x_dyn * std::accumulate(u.begin(), u.end(), 0.0) - (1.0 - x_dyn * delta) * S;
}

Trajectory make_trajectory(std::size_t rows, std::size_t n) {
  Trajectory t;
  for (auto* col : {&t.grid, &t.S, &t.x_real, &t.x_bar, &t.var_mu, &t.kappa, &t.alpha, &t.beta}) {
    col->reserve(rows);
  }
  t.tau_bar.assign(n, {});
  t.P.assign(n, {});
  t.u.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    t.tau_bar[i].reserve(rows);
    t.P[i].reserve(rows);
    t.u[i].reserve(rows);
  }
  return t;
}

struct Row {
  double t, S, x_real, x_bar, kappa, alpha, beta;
  const std::vector<double>& tau_bar;
  const std::vector<double>& P;
  const std::vector<double>& u;
};

void append(Trajectory& traj, const Row& r) {
  if (!(std::isfinite(r.S) && std::isfinite(r.x_bar) && std::isfinite(r.beta))) {
    fail(ErrorKind::kNonFinite, "non-finite state at t = " + std::to_string(r.t));
  }
  traj.grid.push_back(r.t);
  traj.S.push_back(r.S);
  traj.x_real.push_back(r.x_real);
  traj.x_bar.push_back(r.x_bar);
  traj.kappa.push_back(r.kappa);
  traj.alpha.push_back(r.alpha);
  traj.beta.push_back(r.beta);
  traj.var_mu.push_back(variance_or_nan(r.beta, r.kappa, r.alpha));
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    if (!(std::isfinite(r.tau_bar[i]) && std::isfinite(r.P[i]) && std::isfinite(r.u[i]))) {
      fail(ErrorKind::kNonFinite, "non-finite belief or control at t = " + std::to_string(r.t));
    }
    traj.tau_bar[i].push_back(r.tau_bar[i]);
    traj.P[i].push_back(r.P[i]);
    traj.u[i].push_back(r.u[i]);
  }
}

Trajectory simulate_continuous(const GameParams& p, const BeliefPriors& pr, const SimConfig& cfg,
                               const SignalSet& sig, const Grid& grid) {
  const auto n = static_cast<std::size_t>(p.n);
  const double h = cfg.h_ode;
  const bool exact_p = cfg.kalman_variance == VariancePropagation::kClosedForm;
  const bool realized = cfg.dynamics == DynamicsMode::kRealized;

  // y = (S, mu_hat, beta, tau_bar_1..n, P_1..n)
  const Eigen::Index dim = 3 + 2 * p.n;
  Eigen::VectorXd y(dim);
  y[0] = p.S0;
  y[1] = pr.mu0;
  y[2] = pr.beta0;
  for (std::size_t i = 0; i < n; ++i) {
    y[3 + static_cast<Eigen::Index>(i)] = pr.tau0[i];
    y[3 + p.n + static_cast<Eigen::Index>(i)] = pr.P0[i];
  }

  std::vector<double> tau_bar(n), P(n), cost(n), held_u;
  const auto unpack = [&](const Eigen::VectorXd& v) {
    for (std::size_t i = 0; i < n; ++i) {
      tau_bar[i] = v[3 + static_cast<Eigen::Index>(i)];
      P[i] = v[3 + p.n + static_cast<Eigen::Index>(i)];
    }
  };

  Trajectory traj = make_trajectory(grid.steps + 1, n);
  for (std::size_t s = 0;; ++s) {
    const double t = static_cast<double>(s) * h;
    const double kappa = pr.kappa0 + t;
    const double alpha = pr.alpha0 + 0.5 * t;
    const std::size_t epoch = std::min(s, grid.steps - 1) / grid.per_hold;
    const double x = sig.ecological.values[epoch];
    for (std::size_t i = 0; i < n; ++i) cost[i] = sig.cost[i].values[epoch];

    unpack(y);
    if (cfg.refresh == ControlRefresh::kPerEpoch && s % grid.per_hold == 0) {
      held_u = equilibrium_controls(p, y[1], tau_bar, cfg.clamp_controls);
    }
    const auto u_now = cfg.refresh == ControlRefresh::kPerEpoch
                           ? held_u
                           : equilibrium_controls(p, y[1], tau_bar, cfg.clamp_controls);
    append(traj, {t, y[0], x, y[1], kappa, alpha, y[2], tau_bar, P, u_now});
    if (s == grid.steps) break;

    const auto rhs = [&](double local, const Eigen::VectorXd& v) {
      Eigen::VectorXd d(dim);
      const double k = kappa + local;
      const double x_bar = v[1];
      std::vector<double> tb(n), pv(n);
      for (std::size_t i = 0; i < n; ++i) {
        tb[i] = v[3 + static_cast<Eigen::Index>(i)];
        pv[i] = exact_p ? kalman_variance_closed_form(pr.P0[i], pr.R[i], t + local)
                        : v[3 + p.n + static_cast<Eigen::Index>(i)];
      }
      const auto u = cfg.refresh == ControlRefresh::kPerEpoch
                         ? held_u
                         : equilibrium_controls(p, x_bar, tb, cfg.clamp_controls);
      const double x_dyn = realized ? x : x_bar;
      d[0] = stock_rate(v[0], x_dyn, p.delta, u);
      const double innovation = x - x_bar;
      d[1] = innovation / (k + 1.0);
      d[2] = k * innovation * innovation / (2.0 * (k + 1.0));
      for (std::size_t i = 0; i < n; ++i) {
        d[3 + static_cast<Eigen::Index>(i)] = (pv[i] / pr.R[i]) * (cost[i] - tb[i]);
        d[3 + p.n + static_cast<Eigen::Index>(i)] = -(pv[i] * pv[i]) / pr.R[i];
      }
      return d;
    };
    y = rk4_step(y, 0.0, h, rhs);
    if (exact_p) {
      for (std::size_t i = 0; i < n; ++i) {
        y[3 + p.n + static_cast<Eigen::Index>(i)] =
            kalman_variance_closed_form(pr.P0[i], pr.R[i], t + h);
      }
    }
    if (!y.allFinite()) {
      fail(ErrorKind::kNonFinite,
           "simulation state became non-finite at t = " + std::to_string(t + h));
    }
  }
  return traj;
}

Trajectory simulate_discrete(const GameParams& p, const BeliefPriors& pr, const SimConfig& cfg,
                             const SignalSet& sig, const Grid& grid) {
  const auto n = static_cast<std::size_t>(p.n);
  const double h = cfg.h_ode;
  const bool realized = cfg.dynamics == DynamicsMode::kRealized;

  NormalGammaBelief ng{pr.mu0, pr.kappa0, pr.alpha0, pr.beta0, 0.0};
  std::vector<KalmanBelief> kb(n);
  for (std::size_t i = 0; i < n; ++i) kb[i] = {pr.tau0[i], pr.P0[i], pr.R[i], 0.0};

  std::vector<double> tau_bar(n), P(n);
  double S = p.S0;
  Trajectory traj = make_trajectory(grid.steps + 1, n);
  for (std::size_t s = 0;; ++s) {
    const double t = static_cast<double>(s) * h;
    if (s > 0 && s % grid.per_hold == 0) {
      // Signals held over the epoch that just ended are absorbed at its end.
      const std::size_t done = s / grid.per_hold - 1;
      ng = step_discrete(ng, sig.ecological.values[done], cfg.dt_signal);
      for (std::size_t i = 0; i < n; ++i) {
        kb[i] = step_discrete_kalman(kb[i], sig.cost[i].values[done], cfg.dt_signal);
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      tau_bar[i] = kb[i].tau_hat;
      P[i] = kb[i].P;
    }
    const std::size_t epoch = std::min(s, grid.steps - 1) / grid.per_hold;
    const double x = sig.ecological.values[epoch];
    const auto u = equilibrium_controls(p, ng.mu_hat, tau_bar, cfg.clamp_controls);
    append(traj, {t, S, x, ng.mu_hat, ng.kappa, ng.alpha, ng.beta, tau_bar, P, u});
    if (s == grid.steps) break;

    const double x_dyn = realized ? x : ng.mu_hat;
    const auto rhs = [&](double, double v) { return stock_rate(v, x_dyn, p.delta, u); };
    S = rk4_step(S, 0.0, h, rhs);
  }
  return traj;
}

// Sup-norm over the signal epochs, where discrete beliefs are defined.
double sup_gap(const std::vector<double>& a, const std::vector<double>& b, std::size_t stride) {
  double g = 0.0;
  for (std::size_t k = 0; k < a.size(); k += stride) g = std::max(g, std::abs(a[k] - b[k]));
  return g;
}

}  // namespace

void validate(const SimConfig& cfg) {
  require(std::isfinite(cfg.horizon) && cfg.horizon > 0.0, ErrorKind::kInvalidArgument,
          "horizon must be > 0");
  require(std::isfinite(cfg.h_ode) && cfg.h_ode > 0.0, ErrorKind::kInvalidArgument,
          "h_ode must be > 0");
  require(cfg.h_ode <= cfg.dt_signal * (1.0 + 1e-12), ErrorKind::kInvalidArgument,
          "h_ode must not exceed dt_signal");
  exact_ratio(cfg.dt_signal, cfg.h_ode, "dt_signal must be a multiple of h_ode");
  exact_ratio(cfg.horizon, cfg.h_ode, "horizon must be a multiple of h_ode");
}

void validate(const BeliefPriors& pr, int n) {
  validate(NormalGammaBelief{pr.mu0, pr.kappa0, pr.alpha0, pr.beta0, 0.0});
  const auto count = static_cast<std::size_t>(n);
  require(pr.tau0.size() == count && pr.P0.size() == count && pr.R.size() == count,
          ErrorKind::kInvalidArgument, "need tau0, P0 and R for every player");
  for (std::size_t i = 0; i < count; ++i) {
    validate(KalmanBelief{pr.tau0[i], pr.P0[i], pr.R[i], 0.0});
  }
}

SignalSet generate_signals(const GameParams& p, const SignalLaw& law, double dt, double horizon,
                           std::uint64_t seed) {
  validate(p);
  require(law.R.size() == static_cast<std::size_t>(p.n), ErrorKind::kInvalidArgument,
          "signal law needs one R per player");
  SignalSet out;
  out.ecological =
      sample_ecological_trace(law.mu, law.sigma, dt, horizon, {seed, kEcologicalStream});
  for (std::size_t i = 0; i < static_cast<std::size_t>(p.n); ++i) {
    out.cost.push_back(sample_cost_trace(p.tau[i], law.R[i], dt, horizon, {seed, cost_stream(i)}));
    out.cost.back().label = "y_" + std::to_string(i + 1);
  }
  return out;
}

SignalSet subsample(const SignalSet& signals, std::size_t m) {
  SignalSet out;
  out.ecological = subsample(signals.ecological, m);
  for (const auto& tr : signals.cost) out.cost.push_back(subsample(tr, m));
  return out;
}

Trajectory simulate(const GameParams& p, const BeliefPriors& priors, const SimConfig& cfg,
                    const SignalSet& signals) {
  validate(p);
  validate(priors, p.n);
  validate(cfg);
  const Grid grid = make_grid(cfg);
  check_signals(signals, cfg, grid, p.n);
  return cfg.scheme == Scheme::kContinuous ? simulate_continuous(p, priors, cfg, signals, grid)
                                           : simulate_discrete(p, priors, cfg, signals, grid);
}

std::vector<SchemeGap> compare_schemes(const GameParams& p, const BeliefPriors& priors,
                                       const SimConfig& cfg, const SignalLaw& law,
                                       std::vector<double> dt_list, std::uint64_t seed) {
  require(!dt_list.empty(), ErrorKind::kInvalidArgument, "dt list is empty");
  const double finest = *std::min_element(dt_list.begin(), dt_list.end());
  const SignalSet fine = generate_signals(p, law, finest, cfg.horizon, seed);

  std::vector<SchemeGap> rows;
  for (double dt : dt_list) {
    const std::size_t m = exact_ratio(dt, finest, "dt list must be multiples of the finest dt");
    SimConfig c = cfg;
    c.dt_signal = dt;
    const SignalSet coarse = subsample(fine, m);
    c.scheme = Scheme::kContinuous;
    const Trajectory cont = simulate(p, priors, c, coarse);
    c.scheme = Scheme::kDiscrete;
    const Trajectory disc = simulate(p, priors, c, coarse);

    const std::size_t stride = exact_ratio(dt, c.h_ode, "dt / h_ode");
    SchemeGap g;
    g.dt = dt;
    g.x_bar = sup_gap(cont.x_bar, disc.x_bar, stride);
    g.S = sup_gap(cont.S, disc.S, stride);
    g.kappa = sup_gap(cont.kappa, disc.kappa, stride);
    g.alpha = sup_gap(cont.alpha, disc.alpha, stride);
    for (int i = 0; i < p.n; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      g.tau_bar = std::max(g.tau_bar, sup_gap(cont.tau_bar[ii], disc.tau_bar[ii], stride));
      g.u = std::max(g.u, sup_gap(cont.u[ii], disc.u[ii], stride));
    }
    rows.push_back(g);
  }
  return rows;
}

WindowMetrics window_metrics(const Trajectory& traj, const GameParams& p, double mu_true,
                             double t_lo, double t_hi) {
  require(traj.size() > 0, ErrorKind::kInvalidArgument, "empty trajectory");
  const auto known = known_state_equilibrium(p, mu_true).controls;
  WindowMetrics m;
  m.t_lo = t_lo;
  m.t_hi = t_hi;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double t = traj.grid[k];
    if (t < t_lo || t > t_hi) continue;
    m.x_bar_error = std::max(m.x_bar_error, std::abs(traj.x_bar[k] - mu_true));
    if (std::isfinite(traj.var_mu[k])) m.var_mu = std::max(m.var_mu, traj.var_mu[k]);
    for (int i = 0; i < traj.players(); ++i) {
      const auto ii = static_cast<std::size_t>(i);
      m.tau_bar_error = std::max(m.tau_bar_error, std::abs(traj.tau_bar[ii][k] - p.tau[ii]));
      m.P = std::max(m.P, traj.P[ii][k]);
      m.control_gap = std::max(m.control_gap, std::abs(traj.u[ii][k] - known[ii]));
    }
  }
  return m;
}

WindowMetrics convergence_diagnostics(const Trajectory& traj, const GameParams& p, double mu_true,
                                      double tail_fraction) {
  require(traj.size() > 0, ErrorKind::kInvalidArgument, "empty trajectory");
  require(tail_fraction > 0.0 && tail_fraction <= 1.0, ErrorKind::kInvalidArgument,
          "tail fraction must be in (0, 1]");
  const double end = traj.grid.back();
  const double start = traj.grid.front();
  return window_metrics(traj, p, mu_true, end - tail_fraction * (end - start), end);
}

PayoffEstimate discounted_payoff(const Trajectory& traj, const GameParams& p, int player,
                                 double t_trunc) {
  require(player >= 0 && player < traj.players(), ErrorKind::kInvalidArgument,
          "player index out of range");
  require(traj.size() >= 2, ErrorKind::kInvalidArgument, "trajectory too short for quadrature");
  require(t_trunc <= traj.grid.back() * (1.0 + 1e-12), ErrorKind::kInvalidArgument,
          "truncation time beyond trajectory horizon");
  const auto i = static_cast<std::size_t>(player);
  const auto instantaneous = [&](std::size_t k) {
    double total = 0.0;
    for (const auto& col : traj.u) total += col[k];
    return traj.u[i][k] * (p.a[i] - total) - p.tau[i] * traj.S[k];
  };

  PayoffEstimate est;
  double bound = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k) bound = std::max(bound, std::abs(instantaneous(k)));
  est.tail_bound = std::exp(-p.rho * t_trunc) * bound / p.rho;

  double prev_t = traj.grid[0];
  double prev_f = std::exp(-p.rho * prev_t) * instantaneous(0);
  for (std::size_t k = 1; k < traj.size() && prev_t < t_trunc; ++k) {
    const double t = traj.grid[k];
    const double f = std::exp(-p.rho * t) * instantaneous(k);
    if (t <= t_trunc) {
      est.value += 0.5 * (t - prev_t) * (f + prev_f);
    } else {
      // Partial last segment, linear interpolation of the integrand.
      const double w = (t_trunc - prev_t) / (t - prev_t);
      const double f_end = prev_f + w * (f - prev_f);
      est.value += 0.5 * (t_trunc - prev_t) * (prev_f + f_end);
    }
    prev_t = t;
    prev_f = f;
  }
  return est;
}

NonnegativityReport check_nonnegativity(const GameParams& p, const TypeBounds& bounds,
                                        const Trajectory& traj) {
  NonnegativityReport r = check_nonnegativity(p, bounds);
  std::vector<double> mins(traj.u.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < traj.u.size(); ++i) {
    for (double v : traj.u[i]) mins[i] = std::min(mins[i], v);
  }
  r.realized_min_controls = std::move(mins);
  return r;
}

}  // namespace mpgame
