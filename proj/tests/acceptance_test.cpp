// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mpgame/belief_motion.hpp"
#include "mpgame/commands.hpp"
#include "mpgame/config.hpp"
#include "mpgame/equilibrium.hpp"
#include "mpgame/io.hpp"
#include "mpgame/oracles.hpp"
#include "mpgame/simulation.hpp"

using namespace mpgame;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = out.pass;
  if (limit_s > 0.0 && elapsed > limit_s) {
    pass = false;
    out.detail += "; runtime limit " + fmt("%.0f", limit_s) + " s exceeded";
  }
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s (%.2f s)\n", pass ? "PASS" : "FAIL", id, title.c_str(),
              out.detail.c_str(), elapsed);
  std::fflush(stdout);
}

SimConfig sim_of(const ScenarioConfig& cfg, double horizon) {
  SimConfig s = cfg.sim;
  s.horizon = horizon;
  return s;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome protocol_fidelity() {
  const auto cfg = default_config();
  const auto signals = generate_signals(cfg.game, cfg.law, 0.02, 10.0, cfg.seed);
  bool ok = signals.ecological.size() == 500;
  for (const auto& y : signals.cost) ok = ok && y.size() == 500;
  auto sim = sim_of(cfg, 10.0);
  sim.scheme = Scheme::kDiscrete;
  const auto tr = simulate(cfg.game, cfg.priors, sim, signals);
  std::size_t updates = 0;
  for (std::size_t k = 1; k < tr.size(); ++k)
    if (tr.kappa[k] != tr.kappa[k - 1]) ++updates;
  ok = ok && updates == 500;
  return {ok, std::to_string(signals.ecological.size()) + " ecological and " +
                  std::to_string(signals.cost.size()) + "x" +
                  std::to_string(signals.cost[0].size()) + " cost signals, " +
                  std::to_string(updates) + " discrete updates"};
}

Outcome belief_closed_forms() {
  auto cfg = default_config();
  cfg.priors.mu0 = 0.0;
  auto sim = sim_of(cfg, 10.0);
  sim.h_ode = 1e-3;
  const auto signals = generate_signals(cfg.game, cfg.law, sim.dt_signal, 10.0, cfg.seed);
  double mean_err = 0.0, affine_err = 0.0, p_err = 0.0;
  for (auto variance : {VariancePropagation::kClosedForm, VariancePropagation::kOde}) {
    sim.kalman_variance = variance;
    const auto tr = simulate(cfg.game, cfg.priors, sim, signals);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double t = tr.grid[k];
      const double cf = closed_form_mean(signals.ecological, 0.0, cfg.priors.kappa0, t);
      mean_err = std::max(mean_err, std::abs(tr.x_bar[k] - cf) / std::max(std::abs(cf), 1e-12));
      affine_err = std::max({affine_err, std::abs(tr.kappa[k] - (cfg.priors.kappa0 + t)),
                             std::abs(tr.alpha[k] - (cfg.priors.alpha0 + 0.5 * t))});
      for (int i = 0; i < cfg.game.n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double pc = kalman_variance_closed_form(cfg.priors.P0[ui], cfg.priors.R[ui], t);
        p_err = std::max(p_err, std::abs(tr.P[ui][k] - pc) / pc);
      }
    }
  }
  // The first grid point divides by |closed form| ~ 0, so the relative error
  // uses the same floor as everywhere else; kappa/alpha are affine in t and
  // only round-off is allowed.
  const bool ok = mean_err <= 1e-8 && affine_err <= 1e-12 && p_err <= 1e-6;
  return {ok, "mean rel err " + fmt("%.2e", mean_err) + ", kappa/alpha abs err " +
                  fmt("%.2e", affine_err) + ", P rel err " + fmt("%.2e", p_err)};
}

Outcome grid_bayes() {
  const auto cfg = default_config();
  const NormalGammaBelief prior{cfg.priors.mu0, cfg.priors.kappa0, cfg.priors.alpha0,
                                cfg.priors.beta0, 0.0};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto tr = sample_ecological_trace(cfg.law.mu, cfg.law.sigma, 1.0, 50.0, {seed, 0});
    NormalGammaBelief b = prior;
    for (double x : tr.values) b = step_discrete(b, x, 1.0);
    const auto post = grid_bayes_posterior(tr, prior, auto_bayes_grid(tr, prior, 400));
    worst = std::max(worst, std::abs(post.mean - b.mu_hat) / std::abs(b.mu_hat));
  }
  return {worst <= 1e-3, "max rel err over 5 traces " + fmt("%.2e", worst)};
}

Outcome equilibrium_correctness() {
  double worst_foc = 0.0;
  for (const auto& c : random_equilibrium_cases(100, 20240601, 5))
    worst_foc = std::max(worst_foc, c.solution.foc_residual);
  bool br_ok = true;
  double worst_margin = -1e300;
  const auto base = default_config();
  for (int n = 1; n <= 3; ++n) {
    const auto cfg = with_players(base, n);
    for (const auto& b : {BeliefProfile{cfg.law.mu, cfg.game.tau},
                          BeliefProfile{cfg.law.mu, cfg.priors.tau0},
                          BeliefProfile{0.9, cfg.game.tau}}) {
      const auto sol = solve_equilibrium(cfg.game, b);
      for (int i = 0; i < n; ++i) {
        const auto chk = best_response_check(cfg.game, b, sol, i);
        br_ok = br_ok && chk.pass();
        worst_margin = std::max(worst_margin, chk.improvement - chk.tolerance);
      }
    }
  }
  return {worst_foc <= 1e-9 && br_ok,
          "max FOC residual " + fmt("%.2e", worst_foc) +
              ", max (improvement - tolerance) over n=1..3 " + fmt("%.2e", worst_margin)};
}

Outcome closed_form_report() {
  const auto rows = closed_form_comparison(default_config(), 5);
  double worst_known = 0.0, worst_truth = 0.0;
  bool complete = rows.size() == 5;
  for (const auto& row : rows) {
    const auto& ks = row["known_state"];
    complete = complete && ks.contains("deltas") && row.contains("at_truth");
    if (!ks["deltas"].is_null())
      for (double d : ks["deltas"]) worst_known = std::max(worst_known, std::abs(d));
    const auto& printed = row["at_truth"]["printed"];
    if (!printed.is_null())
      for (double d : printed["control_deltas"]) worst_truth = std::max(worst_truth, std::abs(d));
  }
  return {complete, "n=1..5 emitted; max |printed - solver| known-state " +
                        fmt("%.3f", worst_known) + ", belief form at truth " +
                        fmt("%.3f", worst_truth) + " (informational)"};
}

Outcome convergence() {
  const auto cfg = default_config();
  const auto n = static_cast<std::size_t>(cfg.game.n);
  const double horizon = 200.0;
  const auto sim = sim_of(cfg, horizon);
  int wins_x = 0, wins_tau = 0, wins_var = 0, wins_P = 0, wins_u = 0;
  double worst_p_ratio = 0.0;
  const int seeds = 100;
  for (int s = 1; s <= seeds; ++s) {
    const auto signals =
        generate_signals(cfg.game, cfg.law, sim.dt_signal, horizon, static_cast<std::uint64_t>(s));
    const auto tr = simulate(cfg.game, cfg.priors, sim, signals);
    const auto early = window_metrics(tr, cfg.game, cfg.law.mu, 10.0, 20.0);
    const auto tail = convergence_diagnostics(tr, cfg.game, cfg.law.mu, 0.1);
    wins_x += tail.x_bar_error < early.x_bar_error;
    wins_tau += tail.tau_bar_error < early.tau_bar_error;
    wins_var += tail.var_mu < early.var_mu;
    wins_P += tail.P < early.P;
    wins_u += tail.control_gap < early.control_gap;
    for (std::size_t i = 0; i < n; ++i) {
      const double bound = kalman_variance_closed_form(cfg.priors.P0[i], cfg.priors.R[i], horizon);
      worst_p_ratio = std::max(worst_p_ratio, tr.P[i].back() / bound);
    }
  }
  const int need = 95;
  const bool ok = wins_x >= need && wins_tau >= need && wins_var >= need && wins_P >= need &&
                  wins_u >= need && worst_p_ratio <= 1.0 + 1e-6;
  return {ok, "tail [180,200] below [10,20] in " + std::to_string(wins_x) + "/" +
                  std::to_string(wins_tau) + "/" + std::to_string(wins_var) + "/" +
                  std::to_string(wins_P) + "/" + std::to_string(wins_u) +
                  " of 100 seeds (x_bar/tau_bar/var_mu/P/u); max final P / closed form " +
                  fmt("%.9f", worst_p_ratio)};
}

Outcome scheme_agreement() {
  const auto cfg = default_config();
  const auto gaps =
      compare_schemes(cfg.game, cfg.priors, cfg.sim, cfg.law, {0.16, 0.08, 0.04, 0.02}, cfg.seed);
  bool monotone = true;
  double worst_ratio = 0.0;
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    monotone = monotone && gaps[k].x_bar <= gaps[k - 1].x_bar &&
               gaps[k].tau_bar <= gaps[k - 1].tau_bar && gaps[k].u <= gaps[k - 1].u &&
               gaps[k].S <= gaps[k - 1].S;
    worst_ratio = std::max(worst_ratio, gaps[k].x_bar / gaps[k - 1].x_bar);
  }
  std::string series;
  for (const auto& g : gaps) series += fmt(" %.3e", g.x_bar);
  return {monotone && worst_ratio <= 0.7 && gaps.size() == 4,
          std::string(monotone ? "monotone" : "NOT monotone") + " in x_bar/tau_bar/u/S; x_bar gaps" +
              series + "; max halving ratio " + fmt("%.3f", worst_ratio)};
}

Outcome nonnegativity() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0, violations = 0, printed_only = 0, printed_only_negative = 0;
  double min_u = 1e300, min_S = 1e300;
  for (int trial = 0; checked < 40 && trial < 4000; ++trial) {
    ScenarioConfig cfg = default_config();
    const int n = 5 + trial % 3;
    cfg = with_players(cfg, n);
    const double q = 0.5 + unit(rng), Q = q * (1.0 + 0.3 * unit(rng));
    const double scale = 0.5 + 6.0 * unit(rng);
    cfg.game.delta = 0.1 + 0.6 * unit(rng);
    cfg.game.rho = 0.05 + (0.9 - cfg.game.delta) * unit(rng);
    cfg.game.S0 = 2.0 * unit(rng);
    cfg.law.mu = 0.2 + 0.6 * unit(rng);
    cfg.bounds = {q, Q, 1.0};
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      cfg.game.a[ui] = scale * (1.0 + 0.02 * unit(rng));
      cfg.game.tau[ui] = q + (Q - q) * unit(rng);
      cfg.priors.tau0[ui] = q + (Q - q) * unit(rng);
    }
    if (!check_config(cfg).empty()) continue;
    const auto report = check_nonnegativity(cfg.game, cfg.bounds);
    if (!report.printed_conditions()) continue;
    const auto sim = sim_of(cfg, 10.0);
    const auto signals = generate_signals(cfg.game, cfg.law, sim.dt_signal, 10.0,
                                          static_cast<std::uint64_t>(trial) + 1);
    const auto tr = simulate(cfg.game, cfg.priors, sim, signals);
    const auto realized = check_nonnegativity(cfg.game, cfg.bounds, tr);
    const double u_lo = *std::min_element(realized.realized_min_controls->begin(),
                                          realized.realized_min_controls->end());
    const double S_lo = *std::min_element(tr.S.begin(), tr.S.end());
    if (report.passes()) {
      ++checked;
      min_u = std::min(min_u, u_lo);
      min_S = std::min(min_S, S_lo);
      if (u_lo < 0.0 || S_lo < 0.0) ++violations;
    } else {
      ++printed_only;
      if (u_lo < 0.0) ++printed_only_negative;
    }
  }
  return {checked >= 40 && violations == 0,
          std::to_string(checked) + " passing configs, " + std::to_string(violations) +
              " violations, min u " + fmt("%.3f", min_u) + ", min S " + fmt("%.3f", min_S) +
              "; printed conditions alone: " + std::to_string(printed_only_negative) + "/" +
              std::to_string(printed_only) + " configs went negative (informational)"};
}

Outcome determinism() {
  const auto root = fs::temp_directory_path() / "mpgame_acceptance";
  fs::remove_all(root);
  auto cfg = default_config();
  cfg.out_dir = root / "a";
  cmd_simulate(cfg);
  cfg.out_dir = root / "b";
  cmd_simulate(cfg);
  bool same = true;
  int files = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    same = same && slurp(entry.path()) == slurp(root / "b" / entry.path().filename());
  }
  cfg.out_dir = root / "traces";
  cmd_gen_traces(cfg);
  auto replay = cfg;
  replay.seed = cfg.seed + 12345;
  replay.out_dir = root / "replay";
  cmd_simulate(replay, root / "traces");
  const bool replayed =
      slurp(root / "replay" / "trajectory.csv") == slurp(root / "a" / "trajectory.csv");
  return {same && replayed && files >= 3,
          std::to_string(files) + " CSV files byte-identical across runs: " +
              (same ? "yes" : "no") + "; gen-traces replay identical: " +
              (replayed ? "yes" : "no")};
}

}  // namespace

int main() {
  criterion(1, "protocol fidelity", 1.0, protocol_fidelity);
  criterion(2, "belief closed forms", 5.0, belief_closed_forms);
  criterion(3, "grid-Bayes oracle", 30.0, grid_bayes);
  criterion(4, "equilibrium correctness", 120.0, equilibrium_correctness);
  criterion(5, "closed-form comparison report", 1.0, closed_form_report);
  criterion(6, "convergence", 120.0, convergence);
  criterion(7, "scheme agreement", 60.0, scheme_agreement);
  criterion(8, "non-negativity", 30.0, nonnegativity);
  criterion(9, "determinism and replay", 0.0, determinism);
  std::printf("%s: %d criterion failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
