#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "mpgame/config.hpp"
#include "mpgame/oracles.hpp"

namespace mpgame {

// Each command writes its artifacts under cfg.out_dir and returns the process
// exit code. Module errors propagate as exceptions.

// x.csv and y_<i>.csv for the configured seed.
int cmd_gen_traces(const ScenarioConfig& cfg);

// trajectory.csv, beliefs.csv, kalman_<i>.csv and run.json. Replays saved
// traces when traces_dir is given, otherwise samples from the seed.
int cmd_simulate(const ScenarioConfig& cfg,
                 const std::optional<std::filesystem::path>& traces_dir = std::nullopt);

// compare_dt.csv and compare_dt.json, one row per dt.
int cmd_compare_dt(const ScenarioConfig& cfg, const std::vector<double>& dt_list);

// equilibrium.json
int cmd_equilibrium(const ScenarioConfig& cfg);

// verification.json; nonzero when any check fails.
int cmd_verify(const ScenarioConfig& cfg);

SignalSet load_signals(const std::filesystem::path& dir, int n);
void save_signals(const SignalSet& signals, const std::filesystem::path& dir);

// The signals a run uses: replayed from traces_dir or sampled from the seed.
SignalSet scenario_signals(const ScenarioConfig& cfg,
                           const std::optional<std::filesystem::path>& traces_dir);

// The full oracle suite behind `verify`.
VerificationReport run_verification(const ScenarioConfig& cfg);

}  // namespace mpgame
