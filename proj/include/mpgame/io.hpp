#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "mpgame/config.hpp"
#include "mpgame/oracles.hpp"
#include "mpgame/simulation.hpp"

namespace mpgame {

// t,S,x_real,x_bar,var_mu,tau_bar_1..n,P_1..n,u_1..n; one row per ODE grid
// point, 15 significant digits. x_real is the signal held on [t, t + h)
// (the final row repeats the last held value).
void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

// t,mu_hat,kappa,alpha,beta,est_variance
void write_belief_csv(const Trajectory& traj, const std::filesystem::path& path);

// t,tau_hat_<i>,P_<i> for one player (0-based index, 1-based in the header).
void write_kalman_csv(const Trajectory& traj, int player, const std::filesystem::path& path);

// dt,gap_x_bar,gap_tau_bar,gap_u,gap_S,gap_kappa,gap_alpha
void write_gap_csv(const std::vector<SchemeGap>& rows, const std::filesystem::path& path);

nlohmann::json to_json(const GameParams& p);
nlohmann::json to_json(const EquilibriumSolution& s);
nlohmann::json to_json(const NonnegativityReport& r);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const std::vector<SchemeGap>& rows);
nlohmann::json config_json(const ScenarioConfig& cfg);

// Solver output, printed-formula deltas and the value intercepts at one
// belief profile.
nlohmann::json equilibrium_entry(const GameParams& p, const BeliefProfile& b);

// Printed closed forms against the solver for n = 1..n_max, at the
// configured truth and at the configured priors.
nlohmann::json closed_form_comparison(const ScenarioConfig& cfg, int n_max);

void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

// Text form used in CSV output.
std::string format_number(double v);

}  // namespace mpgame
