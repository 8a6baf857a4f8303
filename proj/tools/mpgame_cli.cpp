// mpgame: command-line entry points for trace generation, simulation,
// scheme comparison, equilibrium reports and oracle verification.

#include <CLI11.hpp>
#include <iostream>
#include <optional>

#include "mpgame/commands.hpp"
#include "mpgame/config.hpp"

namespace {

struct Overrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::string> scheme;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--dt", o.dt, "Signal interval override");
  cmd->add_option("--horizon", o.horizon, "Horizon override");
  cmd->add_option("--scheme", o.scheme, "Updating scheme override (continuous|discrete)")
      ->check(CLI::IsMember({"continuous", "discrete"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential games with motion-payoff uncertainty"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  app.add_option("--config", config_path, "Scenario file (INI); built-in defaults if omitted");
  app.add_option("--seed", seed, "Random seed override");
  app.add_option("--out", out_dir, "Output directory override");

  Overrides o;
  auto* gen = app.add_subcommand("gen-traces", "Sample and save the signal traces");
  add_overrides(gen, o);
  auto* sim = app.add_subcommand("simulate", "Simulate stock, beliefs and controls");
  add_overrides(sim, o);
  std::optional<std::string> traces_dir;
  sim->add_option("--traces", traces_dir, "Replay traces saved by gen-traces from this directory");
  auto* cmp = app.add_subcommand("compare-dt", "Discrete vs continuous updating gap table");
  add_overrides(cmp, o);
  std::vector<double> dt_list;
  cmp->add_option("--dt-list", dt_list, "Signal intervals to compare")->delimiter(',');
  auto* eq = app.add_subcommand("equilibrium", "Equilibrium report with closed-form comparisons");
  add_overrides(eq, o);
  auto* ver = app.add_subcommand("verify", "Run the oracle suite");
  add_overrides(ver, o);

  // Global flags are accepted after the subcommand as well.
  for (auto* sub : {gen, sim, cmp, eq, ver}) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    mpgame::ScenarioConfig cfg =
        config_path.empty() ? mpgame::default_config() : mpgame::parse_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.out_dir = *out_dir;
    if (o.dt) cfg.sim.dt_signal = *o.dt;
    if (o.horizon) cfg.sim.horizon = *o.horizon;
    if (o.scheme) cfg.sim.scheme = mpgame::parse_scheme(*o.scheme);
    mpgame::validate(cfg);

    if (*gen) return mpgame::cmd_gen_traces(cfg);
    if (*sim) {
      return mpgame::cmd_simulate(
          cfg, traces_dir ? std::optional<std::filesystem::path>(*traces_dir) : std::nullopt);
    }
    if (*cmp) return mpgame::cmd_compare_dt(cfg, dt_list.empty() ? cfg.compare_dts : dt_list);
    if (*eq) return mpgame::cmd_equilibrium(cfg);
    if (*ver) return mpgame::cmd_verify(cfg);
  } catch (const mpgame::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}
