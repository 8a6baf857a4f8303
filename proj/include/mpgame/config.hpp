#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mpgame/equilibrium.hpp"
#include "mpgame/error.hpp"
#include "mpgame/simulation.hpp"

namespace mpgame {

// Everything one run needs. Parsed from an INI-style file with the sections
// [scenario], [priors], [sim] and [output]; see configs/default.ini.
struct ScenarioConfig {
  GameParams game;
  SignalLaw law;
  BeliefPriors priors;
  SimConfig sim;
  TypeBounds bounds;
  std::vector<double> compare_dts;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

// Carries every violation found, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Built-in scenario; identical to configs/default.ini.
ScenarioConfig default_config();

// Returns all invariant violations of a config (empty when valid).
std::vector<std::string> check_config(const ScenarioConfig& cfg);

// Throws ConfigError listing every violation.
void validate(const ScenarioConfig& cfg);

ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(const std::string& text);

Scheme parse_scheme(const std::string& text);
std::string to_string(Scheme scheme);
std::string to_string(DynamicsMode mode);

// Replicates a, tau, R and the Kalman priors cyclically to n players.
ScenarioConfig with_players(const ScenarioConfig& cfg, int n);

}  // namespace mpgame
