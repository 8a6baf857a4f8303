#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "mpgame/belief_motion.hpp"
#include "mpgame/belief_payoff.hpp"
#include "mpgame/commands.hpp"
#include "mpgame/config.hpp"
#include "mpgame/equilibrium.hpp"
#include "mpgame/error.hpp"
#include "mpgame/io.hpp"
#include "mpgame/oracles.hpp"
#include "mpgame/signal.hpp"
#include "mpgame/simulation.hpp"

namespace py = pybind11;
using namespace mpgame;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Differential games with motion-payoff uncertainty";

  static py::exception<Error> error(m, "MpgameError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      for (const auto& v : e.violations()) msg += "\n  " + v;
      py::set_error(error, msg.c_str());
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<SignalTrace>(m, "SignalTrace")
      .def(py::init<>())
      .def(py::init([](double t0, double dt, std::vector<double> values, std::string label) {
             return SignalTrace{t0, dt, std::move(values), std::move(label)};
           }),
           py::arg("t0"), py::arg("dt"), py::arg("values"), py::arg("label") = "")
      .def_readwrite("t0", &SignalTrace::t0)
      .def_readwrite("dt", &SignalTrace::dt)
      .def_readwrite("values", &SignalTrace::values)
      .def_readwrite("label", &SignalTrace::label)
      .def("__len__", &SignalTrace::size)
      .def("end_time", &SignalTrace::end_time);

  m.def("sample_ecological_trace",
        [](double mu, double sigma, double dt, double horizon, std::uint64_t seed,
           std::uint64_t stream) {
          return sample_ecological_trace(mu, sigma, dt, horizon, {seed, stream});
        },
        py::arg("mu"), py::arg("sigma"), py::arg("dt"), py::arg("horizon"), py::arg("seed"),
        py::arg("stream") = kEcologicalStream);
  m.def("sample_cost_trace",
        [](double tau, double R, double dt, double horizon, std::uint64_t seed,
           std::uint64_t stream) { return sample_cost_trace(tau, R, dt, horizon, {seed, stream}); },
        py::arg("tau"), py::arg("R"), py::arg("dt"), py::arg("horizon"), py::arg("seed"),
        py::arg("stream") = cost_stream(0));
  m.def("hold_value", &hold_value, py::arg("trace"), py::arg("s"));
  m.def("save_trace", &save_trace, py::arg("trace"), py::arg("path"));
  m.def("load_trace", &load_trace, py::arg("path"));

  py::class_<NormalGammaBelief>(m, "NormalGammaBelief")
      .def(py::init([](double mu_hat, double kappa, double alpha, double beta, double t) {
             return NormalGammaBelief{mu_hat, kappa, alpha, beta, t};
           }),
           py::arg("mu_hat") = 0.0, py::arg("kappa") = 1.0, py::arg("alpha") = 2.0,
           py::arg("beta") = 1.0, py::arg("t") = 0.0)
      .def_readwrite("mu_hat", &NormalGammaBelief::mu_hat)
      .def_readwrite("kappa", &NormalGammaBelief::kappa)
      .def_readwrite("alpha", &NormalGammaBelief::alpha)
      .def_readwrite("beta", &NormalGammaBelief::beta)
      .def_readwrite("t", &NormalGammaBelief::t);
  m.def("integrate_continuous", &integrate_continuous, py::arg("belief"), py::arg("signal"),
        py::arg("duration"), py::arg("h"));
  m.def("step_discrete", &step_discrete, py::arg("belief"), py::arg("x"), py::arg("dt"));
  m.def("estimator_variance", &estimator_variance, py::arg("belief"));
  m.def("closed_form_mean", &closed_form_mean, py::arg("trace"), py::arg("mu0"),
        py::arg("kappa0"), py::arg("t"));

  py::enum_<VariancePropagation>(m, "VariancePropagation")
      .value("CLOSED_FORM", VariancePropagation::kClosedForm)
      .value("ODE", VariancePropagation::kOde);
  py::class_<KalmanBelief>(m, "KalmanBelief")
      .def(py::init([](double tau_hat, double P, double R, double t) {
             return KalmanBelief{tau_hat, P, R, t};
           }),
           py::arg("tau_hat") = 0.0, py::arg("P") = 1.0, py::arg("R") = 1.0, py::arg("t") = 0.0)
      .def_readwrite("tau_hat", &KalmanBelief::tau_hat)
      .def_readwrite("P", &KalmanBelief::P)
      .def_readwrite("R", &KalmanBelief::R)
      .def_readwrite("t", &KalmanBelief::t);
  m.def("integrate_kalman", &integrate_kalman, py::arg("belief"), py::arg("signal"),
        py::arg("duration"), py::arg("h"),
        py::arg("variance") = VariancePropagation::kClosedForm);
  m.def("step_discrete_kalman", &step_discrete_kalman, py::arg("belief"), py::arg("y"),
        py::arg("dt"));
  m.def("kalman_variance_closed_form", &kalman_variance_closed_form, py::arg("P0"), py::arg("R"),
        py::arg("t"));

  py::class_<GameParams>(m, "GameParams")
      .def(py::init([](std::vector<double> a, std::vector<double> tau, double delta, double rho,
                       double S0) {
             const int n = static_cast<int>(a.size());
             return GameParams{n, std::move(a), std::move(tau), delta, rho, S0};
           }),
           py::arg("a"), py::arg("tau"), py::arg("delta") = 0.5, py::arg("rho") = 0.25,
           py::arg("S0") = 0.0)
      .def_readwrite("n", &GameParams::n)
      .def_readwrite("a", &GameParams::a)
      .def_readwrite("tau", &GameParams::tau)
      .def_readwrite("delta", &GameParams::delta)
      .def_readwrite("rho", &GameParams::rho)
      .def_readwrite("S0", &GameParams::S0);
  py::class_<BeliefProfile>(m, "BeliefProfile")
      .def(py::init([](double x_bar, std::vector<double> tau_bar) {
             return BeliefProfile{x_bar, std::move(tau_bar)};
           }),
           py::arg("x_bar"), py::arg("tau_bar"))
      .def_readwrite("x_bar", &BeliefProfile::x_bar)
      .def_readwrite("tau_bar", &BeliefProfile::tau_bar);
  py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
      .def_readonly("f1", &EquilibriumSolution::f1)
      .def_readonly("f2", &EquilibriumSolution::f2)
      .def_readonly("A", &EquilibriumSolution::A)
      .def_readonly("controls", &EquilibriumSolution::controls)
      .def_readonly("foc_residual", &EquilibriumSolution::foc_residual)
      .def_readonly("condition", &EquilibriumSolution::condition)
      .def("effective_slope", &EquilibriumSolution::effective_slope);
  m.def("c_bar", &c_bar, py::arg("x_bar"), py::arg("delta"), py::arg("rho"));
  m.def("solve_equilibrium", &solve_equilibrium, py::arg("params"), py::arg("beliefs"));
  m.def("paper_closed_form", &paper_closed_form, py::arg("params"), py::arg("beliefs"));
  m.def("known_state_printed", &known_state_printed, py::arg("params"), py::arg("mu"));

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("grid", &Trajectory::grid)
      .def_readonly("S", &Trajectory::S)
      .def_readonly("x_real", &Trajectory::x_real)
      .def_readonly("x_bar", &Trajectory::x_bar)
      .def_readonly("var_mu", &Trajectory::var_mu)
      .def_readonly("kappa", &Trajectory::kappa)
      .def_readonly("alpha", &Trajectory::alpha)
      .def_readonly("beta", &Trajectory::beta)
      .def_readonly("tau_bar", &Trajectory::tau_bar)
      .def_readonly("P", &Trajectory::P)
      .def_readonly("u", &Trajectory::u)
      .def("__len__", &Trajectory::size);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("game", &ScenarioConfig::game)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def_readwrite("out_dir", &ScenarioConfig::out_dir)
      .def_readwrite("compare_dts", &ScenarioConfig::compare_dts)
      .def_property(
          "horizon", [](const ScenarioConfig& c) { return c.sim.horizon; },
          [](ScenarioConfig& c, double v) { c.sim.horizon = v; })
      .def_property(
          "dt", [](const ScenarioConfig& c) { return c.sim.dt_signal; },
          [](ScenarioConfig& c, double v) { c.sim.dt_signal = v; })
      .def_property(
          "scheme", [](const ScenarioConfig& c) { return to_string(c.sim.scheme); },
          [](ScenarioConfig& c, const std::string& v) { c.sim.scheme = parse_scheme(v); });
  m.def("default_config", &default_config);
  m.def("parse_config", &parse_config, py::arg("path"));
  m.def("parse_config_text", &parse_config_text, py::arg("text"));
  m.def("with_players", &with_players, py::arg("config"), py::arg("n"));

  m.def("simulate",
        [](const ScenarioConfig& cfg) {
          validate(cfg);
          const auto signals = generate_signals(cfg.game, cfg.law, cfg.sim.dt_signal,
                                                cfg.sim.horizon, cfg.seed);
          return simulate(cfg.game, cfg.priors, cfg.sim, signals);
        },
        py::arg("config"), "Simulate the configured scenario with seeded signals.");
  m.def("compare_dt",
        [](const ScenarioConfig& cfg, std::vector<double> dts) {
          const auto rows =
              compare_schemes(cfg.game, cfg.priors, cfg.sim, cfg.law, std::move(dts), cfg.seed);
          return to_json(rows).dump();
        },
        py::arg("config"), py::arg("dt_list"), "Scheme gaps per dt, as a JSON string.");
  m.def("verify",
        [](const ScenarioConfig& cfg) {
          const auto report = run_verification(cfg);
          return py::make_tuple(report.all_pass(), to_json(report).dump());
        },
        py::arg("config"), "Run the oracle suite; returns (all_pass, JSON report).");
  m.def("equilibrium_report",
        [](const ScenarioConfig& cfg, int n_max) { return closed_form_comparison(cfg, n_max).dump(); },
        py::arg("config"), py::arg("n_max") = 5);

  m.def("gen_traces", &cmd_gen_traces, py::arg("config"));
  m.def("simulate_to_files", &cmd_simulate, py::arg("config"),
        py::arg("traces_dir") = std::nullopt);
}
