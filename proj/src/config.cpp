#include "mpgame/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mpgame {
namespace {

namespace pt = boost::property_tree;

std::string join(const std::vector<std::string>& items) {
  std::string out = "invalid configuration:";
  for (const auto& s : items) out += "\n  - " + s;
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  try {
    std::size_t used = 0;
    out = std::stod(t, &used);
    return used == t.size();
  } catch (const std::exception&) {
    return false;
  }
}

bool parse_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double(item, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

bool parse_bool(const std::string& text, bool& out) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") {
    out = true;
    return true;
  }
  if (t == "false" || t == "0" || t == "no" || t == "off") {
    out = false;
    return true;
  }
  return false;
}

bool parse_u64(const std::string& text, std::uint64_t& out) {
  const std::string t = trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) return false;
  try {
    out = std::stoull(t);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

using Setter = std::function<bool(ScenarioConfig&, const std::string&)>;

template <typename F>
Setter setter(F&& f) {
  return Setter(std::forward<F>(f));
}

Setter real_field(std::function<double&(ScenarioConfig&)> field) {
  return [field](ScenarioConfig& c, const std::string& v) { return parse_double(v, field(c)); };
}

Setter list_field(std::function<std::vector<double>&(ScenarioConfig&)> field) {
  return [field](ScenarioConfig& c, const std::string& v) { return parse_list(v, field(c)); };
}

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"scenario",
       {
           {"n", setter([](ScenarioConfig& c, const std::string& v) {
              double d = 0.0;
              if (!parse_double(v, d) || d != std::floor(d)) return false;
              c.game.n = static_cast<int>(d);
              return true;
            })},
           {"a", list_field([](ScenarioConfig& c) -> auto& { return c.game.a; })},
           {"tau", list_field([](ScenarioConfig& c) -> auto& { return c.game.tau; })},
           {"delta", real_field([](ScenarioConfig& c) -> auto& { return c.game.delta; })},
           {"rho", real_field([](ScenarioConfig& c) -> auto& { return c.game.rho; })},
           {"S0", real_field([](ScenarioConfig& c) -> auto& { return c.game.S0; })},
           {"mu", real_field([](ScenarioConfig& c) -> auto& { return c.law.mu; })},
           {"sigma", real_field([](ScenarioConfig& c) -> auto& { return c.law.sigma; })},
           {"R", list_field([](ScenarioConfig& c) -> auto& { return c.law.R; })},
           {"tau_lower", real_field([](ScenarioConfig& c) -> auto& { return c.bounds.tau_lower; })},
           {"tau_upper", real_field([](ScenarioConfig& c) -> auto& { return c.bounds.tau_upper; })},
           {"x_bar_max", real_field([](ScenarioConfig& c) -> auto& { return c.bounds.x_bar_max; })},
       }},
      {"priors",
       {
           {"mu0", real_field([](ScenarioConfig& c) -> auto& { return c.priors.mu0; })},
           {"kappa0", real_field([](ScenarioConfig& c) -> auto& { return c.priors.kappa0; })},
           {"alpha0", real_field([](ScenarioConfig& c) -> auto& { return c.priors.alpha0; })},
           {"beta0", real_field([](ScenarioConfig& c) -> auto& { return c.priors.beta0; })},
           {"tau0", list_field([](ScenarioConfig& c) -> auto& { return c.priors.tau0; })},
           {"P0", list_field([](ScenarioConfig& c) -> auto& { return c.priors.P0; })},
       }},
      {"sim",
       {
           {"scheme", setter([](ScenarioConfig& c, const std::string& v) {
              try {
                c.sim.scheme = parse_scheme(trim(v));
                return true;
              } catch (const Error&) {
                return false;
              }
            })},
           {"dt", real_field([](ScenarioConfig& c) -> auto& { return c.sim.dt_signal; })},
           {"h", real_field([](ScenarioConfig& c) -> auto& { return c.sim.h_ode; })},
           {"horizon", real_field([](ScenarioConfig& c) -> auto& { return c.sim.horizon; })},
           {"dynamics", setter([](ScenarioConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "realized") c.sim.dynamics = DynamicsMode::kRealized;
              else if (t == "expected") c.sim.dynamics = DynamicsMode::kExpected;
              else return false;
              return true;
            })},
           {"clamp_controls", setter([](ScenarioConfig& c, const std::string& v) {
              return parse_bool(v, c.sim.clamp_controls);
            })},
           {"refresh", setter([](ScenarioConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "step") c.sim.refresh = ControlRefresh::kEveryStep;
              else if (t == "epoch") c.sim.refresh = ControlRefresh::kPerEpoch;
              else return false;
              return true;
            })},
           {"kalman_variance", setter([](ScenarioConfig& c, const std::string& v) {
              const auto t = trim(v);
              if (t == "exact") c.sim.kalman_variance = VariancePropagation::kClosedForm;
              else if (t == "ode") c.sim.kalman_variance = VariancePropagation::kOde;
              else return false;
              return true;
            })},
           {"seed", setter([](ScenarioConfig& c, const std::string& v) {
              return parse_u64(v, c.seed);
            })},
           {"compare_dt", list_field([](ScenarioConfig& c) -> auto& { return c.compare_dts; })},
       }},
      {"output",
       {
           {"dir", setter([](ScenarioConfig& c, const std::string& v) {
              c.out_dir = trim(v);
              return !c.out_dir.empty();
            })},
       }},
  };
  return table;
}

// A single value stands for "the same for every player".
void broadcast(std::vector<double>& v, int n) {
  if (v.size() == 1 && n > 1) v.assign(static_cast<std::size_t>(n), v.front());
}

void check_vector(std::vector<std::string>& out, const std::vector<double>& v,
                  const std::string& name, int n, bool positive) {
  if (n >= 1 && v.size() != static_cast<std::size_t>(n)) {
    out.push_back(name + " has " + std::to_string(v.size()) + " entries, expected n = " +
                  std::to_string(n));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      out.push_back(name + " contains a non-finite value");
      break;
    }
    if (positive && x <= 0.0) {
      out.push_back(name + " entries must be > 0");
      break;
    }
  }
}

bool is_multiple(double num, double den) {
  if (!(den > 0.0) || !std::isfinite(num)) return false;
  const double q = num / den;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::round(q));
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : Error(ErrorKind::kParse, join(violations)), violations_(std::move(violations)) {}

Scheme parse_scheme(const std::string& text) {
  if (text == "continuous") return Scheme::kContinuous;
  if (text == "discrete") return Scheme::kDiscrete;
  fail(ErrorKind::kInvalidArgument, "unknown scheme '" + text + "' (continuous|discrete)");
}

std::string to_string(Scheme scheme) {
  return scheme == Scheme::kContinuous ? "continuous" : "discrete";
}

std::string to_string(DynamicsMode mode) {
  return mode == DynamicsMode::kRealized ? "realized" : "expected";
}

ScenarioConfig default_config() {
  ScenarioConfig c;
  c.game.n = 2;
  c.game.a = {3.0, 3.0};
  c.game.tau = {1.0, 1.5};
  c.game.delta = 0.5;
  c.game.rho = 0.25;
  c.game.S0 = 1.0;
  c.law.mu = 0.5;
  c.law.sigma = 0.1;
  c.law.R = {0.25, 0.25};
  c.bounds = {1.0, 1.5, 1.0};
  c.priors.mu0 = 0.0;
  c.priors.kappa0 = 1.0;
  c.priors.alpha0 = 2.0;
  c.priors.beta0 = 1.0;
  c.priors.tau0 = {0.5, 0.5};
  c.priors.P0 = {1.0, 1.0};
  c.priors.R = c.law.R;
  c.sim = SimConfig{};
  c.compare_dts = {0.08, 0.04, 0.02};
  c.seed = 20240601;
  c.out_dir = "out";
  return c;
}

std::vector<std::string> check_config(const ScenarioConfig& c) {
  std::vector<std::string> v;
  const int n = c.game.n;
  if (n < 1) v.push_back("scenario.n must be >= 1");
  check_vector(v, c.game.a, "scenario.a", n, false);
  check_vector(v, c.game.tau, "scenario.tau", n, false);
  check_vector(v, c.law.R, "scenario.R", n, true);
  check_vector(v, c.priors.tau0, "priors.tau0", n, false);
  check_vector(v, c.priors.P0, "priors.P0", n, true);
  if (!(c.game.delta > 0.0 && c.game.delta <= 1.0)) v.push_back("scenario.delta must be in (0, 1]");
  if (!(c.game.rho > 0.0 && std::isfinite(c.game.rho))) v.push_back("scenario.rho must be > 0");
  if (!(c.game.S0 >= 0.0 && std::isfinite(c.game.S0))) v.push_back("scenario.S0 must be >= 0");
  if (!std::isfinite(c.law.mu)) v.push_back("scenario.mu must be finite");
  if (!(c.law.sigma >= 0.0 && std::isfinite(c.law.sigma))) v.push_back("scenario.sigma must be >= 0");
  if (std::isfinite(c.law.mu) && c.game.delta > 0.0 && c.game.rho > 0.0 &&
      std::abs(1.0 - c.law.mu * c.game.delta - c.game.rho) <= kSingularEps) {
    v.push_back("1 - mu delta - rho is within 1e-9 of zero at the configured truth");
  }
  if (!(c.bounds.tau_lower <= c.bounds.tau_upper)) {
    v.push_back("scenario.tau_lower must not exceed scenario.tau_upper");
  }
  if (!std::isfinite(c.priors.mu0)) v.push_back("priors.mu0 must be finite");
  if (!(c.priors.kappa0 > 0.0)) v.push_back("priors.kappa0 must be > 0");
  if (!(c.priors.alpha0 > 0.0)) v.push_back("priors.alpha0 must be > 0");
  if (!(c.priors.beta0 >= 0.0)) v.push_back("priors.beta0 must be >= 0");
  if (!(c.sim.dt_signal > 0.0)) v.push_back("sim.dt must be > 0");
  if (!(c.sim.h_ode > 0.0)) v.push_back("sim.h must be > 0");
  if (!(c.sim.horizon > 0.0)) v.push_back("sim.horizon must be > 0");
  if (c.sim.dt_signal > 0.0 && c.sim.h_ode > 0.0) {
    if (c.sim.h_ode > c.sim.dt_signal * (1.0 + 1e-12)) v.push_back("sim.h must not exceed sim.dt");
    if (!is_multiple(c.sim.dt_signal, c.sim.h_ode)) v.push_back("sim.dt must be a multiple of sim.h");
    if (c.sim.horizon > 0.0 && !is_multiple(c.sim.horizon, c.sim.dt_signal)) {
      v.push_back("sim.horizon must be a multiple of sim.dt");
    }
  }
  for (double dt : c.compare_dts) {
    if (!(dt > 0.0) || (c.sim.h_ode > 0.0 && !is_multiple(dt, c.sim.h_ode))) {
      v.push_back("sim.compare_dt entries must be positive multiples of sim.h");
      break;
    }
  }
  if (!c.priors.R.empty() && c.priors.R != c.law.R) {
    v.push_back("Kalman noise variance must equal the signal noise variance R");
  }
  return v;
}

void validate(const ScenarioConfig& cfg) {
  auto v = check_config(cfg);
  if (!v.empty()) throw ConfigError(std::move(v));
}

ScenarioConfig parse_config_text(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax error: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  ScenarioConfig c = default_config();
  std::vector<std::string> violations;
  std::set<std::string> seen;
  const auto& table = schema();
  for (const auto& [section, keys] : tree) {
    const auto sec = table.find(section);
    if (sec == table.end()) {
      violations.push_back(keys.data().empty() ? "unknown section [" + section + "]"
                                               : "key '" + section + "' outside any section");
      continue;
    }
    for (const auto& [key, value] : keys) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        violations.push_back("unknown key " + section + "." + key);
        continue;
      }
      seen.insert(section + "." + key);
      if (!it->second(c, value.data())) {
        violations.push_back("cannot parse " + section + "." + key + " = '" + value.data() + "'");
      }
    }
  }
  if (!violations.empty()) throw ConfigError(std::move(violations));

  // Per-player keys left out of the file take the defaults, cycled to n.
  const ScenarioConfig fallback = with_players(default_config(), std::max(c.game.n, 1));
  struct PerPlayer {
    const char* key;
    std::vector<double>* value;
    const std::vector<double>* fallback;
  };
  for (const PerPlayer& pp : {PerPlayer{"scenario.a", &c.game.a, &fallback.game.a},
                              PerPlayer{"scenario.tau", &c.game.tau, &fallback.game.tau},
                              PerPlayer{"scenario.R", &c.law.R, &fallback.law.R},
                              PerPlayer{"priors.tau0", &c.priors.tau0, &fallback.priors.tau0},
                              PerPlayer{"priors.P0", &c.priors.P0, &fallback.priors.P0}}) {
    if (seen.count(pp.key) == 0) {
      *pp.value = *pp.fallback;
    } else {
      broadcast(*pp.value, c.game.n);
    }
  }
  c.priors.R = c.law.R;
  validate(c);
  return c;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path.string()});
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

ScenarioConfig with_players(const ScenarioConfig& cfg, int n) {
  ScenarioConfig c = cfg;
  const auto cycle = [n](const std::vector<double>& v) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = v[i % v.size()];
    return out;
  };
  c.game.n = n;
  c.game.a = cycle(cfg.game.a);
  c.game.tau = cycle(cfg.game.tau);
  c.law.R = cycle(cfg.law.R);
  c.priors.tau0 = cycle(cfg.priors.tau0);
  c.priors.P0 = cycle(cfg.priors.P0);
  c.priors.R = c.law.R;
  return c;
}

}  // namespace mpgame
