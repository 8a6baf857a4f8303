#include "mpgame/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "mpgame/io.hpp"

namespace mpgame {
namespace {

using nlohmann::json;

std::filesystem::path cost_trace_path(const std::filesystem::path& dir, std::size_t i) {
  return dir / ("y_" + std::to_string(i + 1) + ".csv");
}

// Finest ODE step that divides dt and is at most 1e-3.
double verification_step(double dt) { return dt / std::ceil(dt / 1e-3 - 1e-9); }

bool non_increasing(const std::vector<SchemeGap>& rows, double SchemeGap::*field) {
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (rows[k].*field > rows[k - 1].*field) return false;
  }
  return true;
}

}  // namespace

void save_signals(const SignalSet& signals, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_trace(signals.ecological, dir / "x.csv");
  for (std::size_t i = 0; i < signals.cost.size(); ++i) {
    save_trace(signals.cost[i], cost_trace_path(dir, i));
  }
}

SignalSet load_signals(const std::filesystem::path& dir, int n) {
  SignalSet s;
  s.ecological = load_trace(dir / "x.csv");
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    s.cost.push_back(load_trace(cost_trace_path(dir, i)));
  }
  return s;
}

SignalSet scenario_signals(const ScenarioConfig& cfg,
                           const std::optional<std::filesystem::path>& traces_dir) {
  if (traces_dir) return load_signals(*traces_dir, cfg.game.n);
  return generate_signals(cfg.game, cfg.law, cfg.sim.dt_signal, cfg.sim.horizon, cfg.seed);
}

int cmd_gen_traces(const ScenarioConfig& cfg) {
  validate(cfg);
  const SignalSet s = scenario_signals(cfg, std::nullopt);
  save_signals(s, cfg.out_dir);
  std::cout << "wrote " << 1 + s.cost.size() << " traces of " << s.ecological.size()
            << " signals to " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_simulate(const ScenarioConfig& cfg,
                 const std::optional<std::filesystem::path>& traces_dir) {
  validate(cfg);
  const SignalSet signals = scenario_signals(cfg, traces_dir);
  const Trajectory traj = simulate(cfg.game, cfg.priors, cfg.sim, signals);

  write_trajectory_csv(traj, cfg.out_dir / "trajectory.csv");
  write_belief_csv(traj, cfg.out_dir / "beliefs.csv");
  for (int i = 0; i < traj.players(); ++i) {
    write_kalman_csv(traj, i, cfg.out_dir / ("kalman_" + std::to_string(i + 1) + ".csv"));
  }

  const auto tail = convergence_diagnostics(traj, cfg.game, cfg.law.mu, 0.1);
  const auto nonneg = check_nonnegativity(cfg.game, cfg.bounds, traj);
  json run = {{"config", config_json(cfg)},
              {"signals", traces_dir ? "replayed" : "sampled"},
              {"signal_epochs", signals.ecological.size()},
              {"rows", traj.size()},
              {"final_S", traj.S.back()},
              {"tail_diagnostics",
               {{"t_lo", tail.t_lo},
                {"t_hi", tail.t_hi},
                {"x_bar_error", tail.x_bar_error},
                {"tau_bar_error", tail.tau_bar_error},
                {"var_mu", tail.var_mu},
                {"P", tail.P},
                {"control_gap", tail.control_gap}}},
              {"nonnegativity", to_json(nonneg)}};
  write_json(run, cfg.out_dir / "run.json");
  std::cout << "simulated " << traj.size() << " grid points (" << to_string(cfg.sim.scheme)
            << ") into " << cfg.out_dir.string() << '\n';
  return 0;
}

int cmd_compare_dt(const ScenarioConfig& cfg, const std::vector<double>& dt_list) {
  validate(cfg);
  const auto rows = compare_schemes(cfg.game, cfg.priors, cfg.sim, cfg.law, dt_list, cfg.seed);
  write_gap_csv(rows, cfg.out_dir / "compare_dt.csv");
  std::vector<double> ratios;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    ratios.push_back(rows[k - 1].x_bar > 0.0 ? rows[k].x_bar / rows[k - 1].x_bar : 0.0);
  }
  json doc = {{"config", config_json(cfg)},
              {"rows", to_json(rows)},
              {"x_bar_gap_ratios", ratios},
              {"non_increasing",
               {{"x_bar", non_increasing(rows, &SchemeGap::x_bar)},
                {"tau_bar", non_increasing(rows, &SchemeGap::tau_bar)},
                {"u", non_increasing(rows, &SchemeGap::u)},
                {"S", non_increasing(rows, &SchemeGap::S)}}}};
  write_json(doc, cfg.out_dir / "compare_dt.json");
  std::cout << "compared " << rows.size() << " signal intervals into " << cfg.out_dir.string()
            << '\n';
  return 0;
}

int cmd_equilibrium(const ScenarioConfig& cfg) {
  validate(cfg);
  const auto& p = cfg.game;
  json doc = {{"config", config_json(cfg)}};
  doc["at_truth"] = equilibrium_entry(p, BeliefProfile{cfg.law.mu, p.tau});
  doc["at_priors"] = equilibrium_entry(p, BeliefProfile{cfg.priors.mu0, cfg.priors.tau0});
  const auto known = known_state_equilibrium(p, cfg.law.mu);
  doc["known_state"] = {{"solver", known.controls},
                        {"printed", known.printed ? json(*known.printed) : json(nullptr)},
                        {"deltas", known.printed ? json(known.deltas) : json(nullptr)}};
  doc["nonnegativity"] = to_json(check_nonnegativity(p, cfg.bounds));
  doc["comparison_by_n"] = closed_form_comparison(cfg, 5);
  write_json(doc, cfg.out_dir / "equilibrium.json");
  std::cout << "wrote " << (cfg.out_dir / "equilibrium.json").string() << '\n';
  return 0;
}

VerificationReport run_verification(const ScenarioConfig& cfg) {
  validate(cfg);
  const SignalSet signals = scenario_signals(cfg, std::nullopt);
  const double h = verification_step(cfg.sim.dt_signal);

  RunArtifacts runs;
  runs.belief_runs.push_back({"ecological belief", signals.ecological,
                              {cfg.priors.mu0, cfg.priors.kappa0, cfg.priors.alpha0,
                               cfg.priors.beta0, 0.0},
                              h});
  for (std::size_t i = 0; i < signals.cost.size(); ++i) {
    runs.kalman_runs.push_back({"kalman player " + std::to_string(i + 1), signals.cost[i],
                                {cfg.priors.tau0[i], cfg.priors.P0[i], cfg.priors.R[i], 0.0},
                                h});
  }
  const auto& p = cfg.game;
  for (const auto& [name, beliefs] :
       {std::pair{"default at truth", BeliefProfile{cfg.law.mu, p.tau}},
        std::pair{"default at priors", BeliefProfile{cfg.priors.mu0, cfg.priors.tau0}}}) {
    runs.equilibrium_cases.push_back({name, p, beliefs, solve_equilibrium(p, beliefs)});
  }
  for (auto& c : random_equilibrium_cases(100, cfg.seed)) {
    runs.equilibrium_cases.push_back(std::move(c));
  }
  VerificationReport report = closed_form_cross_check(runs);

  // Conjugate updates against brute-force Bayes after 50 unit-interval observations.
  {
    SignalTrace obs = signals.ecological;
    obs.values.resize(std::min<std::size_t>(50, obs.values.size()));
    obs.dt = 1.0;
    const NormalGammaBelief prior{cfg.priors.mu0, cfg.priors.kappa0, cfg.priors.alpha0,
                                  cfg.priors.beta0, 0.0};
    NormalGammaBelief b = prior;
    for (double x : obs.values) b = step_discrete(b, x, 1.0);
    const auto post = grid_bayes_posterior(obs, prior, auto_bayes_grid(obs, prior, 400));
    report.add("grid Bayes vs conjugate posterior mean (rel err)", 1e-3,
               std::abs(post.mean - b.mu_hat) / std::abs(b.mu_hat));
  }

  for (int n = 1; n <= 3; ++n) {
    const ScenarioConfig c = with_players(cfg, n);
    const BeliefProfile b{c.law.mu, c.priors.tau0};
    const auto sol = solve_equilibrium(c.game, b);
    double worst = -1e300;
    for (int i = 0; i < n; ++i) {
      const auto chk = best_response_check(c.game, b, sol, i);
      worst = std::max(worst, chk.improvement - chk.tolerance);
    }
    report.add("best response n=" + std::to_string(n) + " (improvement minus allowance)", 0.0,
               worst);
  }

  {
    const Trajectory traj = simulate(p, cfg.priors, cfg.sim, signals);
    const auto nonneg = check_nonnegativity(p, cfg.bounds, traj);
    report.add_info("non-negativity conditions pass", nonneg.passes() ? 1.0 : 0.0);
    if (nonneg.passes()) {
      const double worst = *std::min_element(nonneg.realized_min_controls->begin(),
                                             nonneg.realized_min_controls->end());
      report.add("realized min control (negated)", 0.0, -worst);
      report.add("min stock (negated)", 0.0, -*std::min_element(traj.S.begin(), traj.S.end()));
    }
  }
  return report;
}

int cmd_verify(const ScenarioConfig& cfg) {
  const VerificationReport report = run_verification(cfg);
  json doc = to_json(report);
  doc["config"] = config_json(cfg);
  write_json(doc, cfg.out_dir / "verification.json");
  int failed = 0;
  for (const auto& c : report.checks) {
    if (!c.pass && !c.informational) {
      ++failed;
      std::cerr << "FAILED: " << c.name << " observed " << c.observed << " > tolerance "
                << c.tolerance << '\n';
    }
  }
  std::cout << report.checks.size() - static_cast<std::size_t>(failed) << '/'
            << report.checks.size() << " checks passed; report in "
            << (cfg.out_dir / "verification.json").string() << '\n';
  return failed == 0 ? 0 : 1;
}

}  // namespace mpgame
