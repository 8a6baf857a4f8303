#include "mpgame/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mpgame/error.hpp"

namespace mpgame {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for " + path.string());
}

json maybe_number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  const int n = traj.players();
  out << "t,S,x_real,x_bar,var_mu";
  for (int i = 1; i <= n; ++i) out << ",tau_bar_" << i;
  for (int i = 1; i <= n; ++i) out << ",P_" << i;
  for (int i = 1; i <= n; ++i) out << ",u_" << i;
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.grid[k]) << ',' << format_number(traj.S[k]) << ','
        << format_number(traj.x_real[k]) << ',' << format_number(traj.x_bar[k]) << ','
        << format_number(traj.var_mu[k]);
    for (const auto& col : traj.tau_bar) out << ',' << format_number(col[k]);
    for (const auto& col : traj.P) out << ',' << format_number(col[k]);
    for (const auto& col : traj.u) out << ',' << format_number(col[k]);
    out << '\n';
  }
  finish(out, path);
}

void write_belief_csv(const Trajectory& traj, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,mu_hat,kappa,alpha,beta,est_variance\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.grid[k]) << ',' << format_number(traj.x_bar[k]) << ','
        << format_number(traj.kappa[k]) << ',' << format_number(traj.alpha[k]) << ','
        << format_number(traj.beta[k]) << ',' << format_number(traj.var_mu[k]) << '\n';
  }
  finish(out, path);
}

void write_kalman_csv(const Trajectory& traj, int player, const std::filesystem::path& path) {
  require(player >= 0 && player < traj.players(), ErrorKind::kInvalidArgument,
          "player index out of range");
  const auto i = static_cast<std::size_t>(player);
  auto out = open_out(path);
  out << "t,tau_hat_" << player + 1 << ",P_" << player + 1 << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_number(traj.grid[k]) << ',' << format_number(traj.tau_bar[i][k]) << ','
        << format_number(traj.P[i][k]) << '\n';
  }
  finish(out, path);
}

void write_gap_csv(const std::vector<SchemeGap>& rows, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "dt,gap_x_bar,gap_tau_bar,gap_u,gap_S,gap_kappa,gap_alpha\n";
  for (const auto& g : rows) {
    out << format_number(g.dt) << ',' << format_number(g.x_bar) << ','
        << format_number(g.tau_bar) << ',' << format_number(g.u) << ',' << format_number(g.S)
        << ',' << format_number(g.kappa) << ',' << format_number(g.alpha) << '\n';
  }
  finish(out, path);
}

json to_json(const GameParams& p) {
  return {{"n", p.n}, {"a", p.a},     {"tau", p.tau},
          {"delta", p.delta}, {"rho", p.rho}, {"S0", p.S0}};
}

json to_json(const EquilibriumSolution& s) {
  return {{"f1", s.f1},
          {"f2", s.f2},
          {"A", s.A},
          {"controls", s.controls},
          {"foc_residual", s.foc_residual},
          {"condition", s.condition},
          {"effective_slope", s.effective_slope()}};
}

json to_json(const NonnegativityReport& r) {
  json j = {{"intercept_condition", r.intercept_condition},
            {"type_condition", r.type_condition},
            {"discount_condition", r.discount_condition},
            {"solver_margin_condition", r.solver_margin_condition},
            {"printed_conditions", r.printed_conditions()},
            {"passes", r.passes()},
            {"intercept_margin", maybe_number(r.intercept_margin)},
            {"type_margin", maybe_number(r.type_margin)},
            {"solver_margin", maybe_number(r.solver_margin)}};
  j["realized_min_controls"] =
      r.realized_min_controls ? json(*r.realized_min_controls) : json(nullptr);
  return j;
}

json to_json(const VerificationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"tolerance", c.informational ? json(nullptr) : json(c.tolerance)},
                      {"observed", maybe_number(c.observed)},
                      {"pass", c.pass},
                      {"informational", c.informational}});
  }
  return {{"all_pass", r.all_pass()}, {"checks", checks}};
}

json to_json(const std::vector<SchemeGap>& rows) {
  json out = json::array();
  for (const auto& g : rows) {
    out.push_back({{"dt", g.dt},
                   {"gap_x_bar", g.x_bar},
                   {"gap_tau_bar", g.tau_bar},
                   {"gap_u", g.u},
                   {"gap_S", g.S},
                   {"gap_kappa", g.kappa},
                   {"gap_alpha", g.alpha}});
  }
  return out;
}

json config_json(const ScenarioConfig& c) {
  return {{"note", "numeric constants other than n, dt and horizon are repository defaults"},
          {"game", to_json(c.game)},
          {"signal_law", {{"mu", c.law.mu}, {"sigma", c.law.sigma}, {"R", c.law.R}}},
          {"priors",
           {{"mu0", c.priors.mu0},
            {"kappa0", c.priors.kappa0},
            {"alpha0", c.priors.alpha0},
            {"beta0", c.priors.beta0},
            {"tau0", c.priors.tau0},
            {"P0", c.priors.P0}}},
          {"sim",
           {{"scheme", to_string(c.sim.scheme)},
            {"dt", c.sim.dt_signal},
            {"h", c.sim.h_ode},
            {"horizon", c.sim.horizon},
            {"dynamics", to_string(c.sim.dynamics)},
            {"clamp_controls", c.sim.clamp_controls},
            {"refresh", c.sim.refresh == ControlRefresh::kEveryStep ? "step" : "epoch"},
            {"kalman_variance",
             c.sim.kalman_variance == VariancePropagation::kClosedForm ? "exact" : "ode"}}},
          {"type_bounds",
           {{"tau_lower", c.bounds.tau_lower},
            {"tau_upper", c.bounds.tau_upper},
            {"x_bar_max", c.bounds.x_bar_max}}},
          {"seed", c.seed}};
}

json equilibrium_entry(const GameParams& p, const BeliefProfile& b) {
  const auto sol = solve_equilibrium(p, b);
  json j = {{"inputs", {{"x_bar", b.x_bar}, {"tau_bar", b.tau_bar}}},
            {"solution", to_json(sol)},
            {"B", value_intercepts(p, b, sol)}};
  if (std::abs(1.0 - b.x_bar * p.delta - p.rho) > kSingularEps) {
    const auto printed = paper_closed_form(p, b);
    std::vector<double> du(printed.size()), printed_A(printed.size()), dA(printed.size());
    for (std::size_t i = 0; i < printed.size(); ++i) {
      du[i] = printed[i] - sol.controls[i];
      printed_A[i] = value_slope_printed(p.tau[i], b.x_bar, p.delta, p.rho);
      dA[i] = printed_A[i] - sol.A[i];
    }
    j["printed"] = {{"c_bar", c_bar(b.x_bar, p.delta, p.rho)},
                    {"controls", printed},
                    {"control_deltas", du},
                    {"A", printed_A},
                    {"A_deltas", dA}};
  } else {
    j["printed"] = nullptr;
  }
  return j;
}

json closed_form_comparison(const ScenarioConfig& cfg, int n_max) {
  json rows = json::array();
  for (int n = 1; n <= n_max; ++n) {
    const ScenarioConfig c = with_players(cfg, n);
    const auto known = known_state_equilibrium(c.game, c.law.mu);
    json row = {{"n", n},
                {"known_state",
                 {{"solver", known.controls},
                  {"printed", known.printed ? json(*known.printed) : json(nullptr)},
                  {"deltas", known.printed ? json(known.deltas) : json(nullptr)}}}};
    row["at_truth"] = equilibrium_entry(c.game, BeliefProfile{c.law.mu, c.game.tau});
    row["at_prior_types"] = equilibrium_entry(c.game, BeliefProfile{c.law.mu, c.priors.tau0});
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_json(const json& doc, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

}  // namespace mpgame
