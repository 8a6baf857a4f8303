#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mpgame/error.hpp"
#include "mpgame/simulation.hpp"

using namespace mpgame;

namespace {

GameParams game() { return {2, {3.0, 3.0}, {1.0, 1.5}, 0.5, 0.25, 1.0}; }

BeliefPriors priors() { return {0.0, 1.0, 2.0, 1.0, {0.5, 0.5}, {1.0, 1.0}, {0.25, 0.25}}; }

SignalLaw law() { return {0.5, 0.1, {0.25, 0.25}}; }

SimConfig config(double dt = 0.02, double h = 0.002, double horizon = 10.0) {
  SimConfig c;
  c.dt_signal = dt;
  c.h_ode = h;
  c.horizon = horizon;
  return c;
}

// Beliefs start at the truth and the signals are noiseless, so every
// estimate stays put.
struct PerfectInfo {
  GameParams p = game();
  BeliefPriors pr = priors();
  SignalLaw lw = law();
  PerfectInfo() {
    pr.mu0 = lw.mu;
    pr.tau0 = p.tau;
    lw.sigma = 0.0;
    lw.R = {0.0, 0.0};
  }
};

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

}  // namespace

TEST_CASE("trajectory shape under the reference protocol") {
  const auto signals = generate_signals(game(), law(), 0.02, 10.0, 7);
  CHECK(signals.ecological.size() == 500);
  REQUIRE(signals.cost.size() == 2);
  CHECK(signals.cost[1].label == "y_2");
  for (auto scheme : {Scheme::kContinuous, Scheme::kDiscrete}) {
    auto c = config();
    c.scheme = scheme;
    const auto tr = simulate(game(), priors(), c, signals);
    CHECK(tr.size() == 5001);
    CHECK(tr.players() == 2);
    CHECK(tr.grid.back() == doctest::Approx(10.0));
    CHECK(tr.kappa.back() == doctest::Approx(11.0));
    CHECK(tr.alpha.back() == doctest::Approx(7.0));
  }
}

TEST_CASE("zero controls and zero stock stay at zero") {
  GameParams p{1, {0.0}, {0.0}, 0.5, 0.25, 0.0};
  BeliefPriors pr{0.5, 1.0, 2.0, 1.0, {0.0}, {1.0}, {1.0}};
  SignalLaw lw{0.5, 0.2, {0.0}};
  const auto tr = simulate(p, pr, config(0.1, 0.01, 2.0), generate_signals(p, lw, 0.1, 2.0, 1));
  for (double s : tr.S) CHECK(s == 0.0);
  for (double u : tr.u[0]) CHECK(u == 0.0);
}

TEST_CASE("stock follows the linear ODE when beliefs are exact") {
  PerfectInfo f;
  for (auto mode : {DynamicsMode::kRealized, DynamicsMode::kExpected}) {
    auto c = config(0.1, 0.01, 5.0);
    c.dynamics = mode;
    const auto tr = simulate(f.p, f.pr, c, generate_signals(f.p, f.lw, 0.1, 5.0, 3));
    const double x = f.lw.mu, k = 1.0 - x * f.p.delta;
    const double U = tr.u[0][0] + tr.u[1][0];
    const double S_inf = x * U / k;
    for (std::size_t j = 0; j < tr.size(); ++j) {
      const double exact = S_inf + (f.p.S0 - S_inf) * std::exp(-k * tr.grid[j]);
      CHECK(std::abs(tr.S[j] - exact) <= 1e-10);
    }
  }
}

TEST_CASE("expected and realized dynamics coincide without noise") {
  PerfectInfo f;
  f.pr.tau0 = {0.5, 0.5};
  f.lw.R = {0.25, 0.25};
  const auto signals = generate_signals(f.p, f.lw, 0.05, 4.0, 9);
  auto c = config(0.05, 0.005, 4.0);
  const auto real = simulate(f.p, f.pr, c, signals);
  c.dynamics = DynamicsMode::kExpected;
  const auto expected = simulate(f.p, f.pr, c, signals);
  CHECK(max_abs_diff(real.S, expected.S) <= 1e-14);
}

TEST_CASE("perfect information gives zero belief and control gaps") {
  PerfectInfo f;
  const auto tr = simulate(f.p, f.pr, config(0.05, 0.005, 5.0),
                           generate_signals(f.p, f.lw, 0.05, 5.0, 2));
  const auto m = convergence_diagnostics(tr, f.p, f.lw.mu, 0.5);
  CHECK(m.x_bar_error <= 1e-14);
  CHECK(m.tau_bar_error <= 1e-14);
  CHECK(m.control_gap <= 1e-12);
}

TEST_CASE("RK4 refinement shows fourth-order convergence in the stock") {
  // The belief ODEs have the form m' = -m/(K + t) between jumps, which RK4
  // reproduces to round-off, so only the stock carries a visible error.
  const auto p = game();
  const auto signals = generate_signals(p, law(), 0.2, 2.0, 4);
  std::vector<double> finals;
  for (double h : {0.1, 0.05, 0.025}) {
    finals.push_back(simulate(p, priors(), config(0.2, h, 2.0), signals).S.back());
  }
  const double e1 = std::abs(finals[0] - finals[1]);
  const double e2 = std::abs(finals[1] - finals[2]);
  CHECK(e1 > 1e-12);
  CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("repeated runs are bitwise identical") {
  const auto signals = generate_signals(game(), law(), 0.02, 2.0, 11);
  const auto a = simulate(game(), priors(), config(0.02, 0.002, 2.0), signals);
  const auto b = simulate(game(), priors(), config(0.02, 0.002, 2.0), signals);
  CHECK(a.S == b.S);
  CHECK(a.u == b.u);
  CHECK(a.tau_bar == b.tau_bar);
}

TEST_CASE("discrete beliefs are held between epochs") {
  auto c = config(0.1, 0.01, 1.0);
  c.scheme = Scheme::kDiscrete;
  const auto tr = simulate(game(), priors(), c, generate_signals(game(), law(), 0.1, 1.0, 5));
  for (std::size_t j = 1; j < tr.size(); ++j) {
    if (j % 10 == 0) continue;
    CHECK(tr.x_bar[j] == tr.x_bar[j - 1]);
    CHECK(tr.tau_bar[1][j] == tr.tau_bar[1][j - 1]);
  }
  CHECK(tr.x_bar[10] != tr.x_bar[9]);
}

TEST_CASE("scheme gaps shrink with the signal interval") {
  const auto gaps = compare_schemes(game(), priors(), config(), law(), {0.08, 0.04, 0.02}, 20240601);
  REQUIRE(gaps.size() == 3);
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    CHECK(gaps[k].x_bar <= gaps[k - 1].x_bar);
    CHECK(gaps[k].tau_bar <= gaps[k - 1].tau_bar);
    CHECK(gaps[k].u <= gaps[k - 1].u);
  }
  CHECK(gaps[1].x_bar / gaps[0].x_bar <= 0.7);
  for (const auto& g : gaps) {
    CHECK(g.kappa <= 1e-9);
    CHECK(g.alpha <= 1e-9);
  }

  SUBCASE("dt equal to h gives identical kappa") {
    const auto same = compare_schemes(game(), priors(), config(0.02, 0.02, 1.0), law(), {0.02}, 1);
    CHECK(same[0].kappa <= 1e-12);
  }
}

TEST_CASE("per-epoch control refresh stays close to continuous refresh") {
  const auto signals = generate_signals(game(), law(), 0.02, 5.0, 13);
  auto c = config(0.02, 0.002, 5.0);
  const auto every = simulate(game(), priors(), c, signals);
  c.refresh = ControlRefresh::kPerEpoch;
  const auto epoch = simulate(game(), priors(), c, signals);
  CHECK(max_abs_diff(every.S, epoch.S) <= 0.05);
}

TEST_CASE("beliefs concentrate over a long horizon") {
  int better = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto signals = generate_signals(game(), law(), 0.02, 100.0, seed);
    const auto tr = simulate(game(), priors(), config(0.02, 0.002, 100.0), signals);
    const auto early = window_metrics(tr, game(), law().mu, 10.0, 20.0);
    const auto tail = convergence_diagnostics(tr, game(), law().mu, 0.1);
    if (tail.x_bar_error < early.x_bar_error && tail.tau_bar_error < early.tau_bar_error) ++better;
    const auto at1 = window_metrics(tr, game(), law().mu, 1.0, 1.0);
    CHECK(tail.var_mu < at1.var_mu);
  }
  CHECK(better >= 9);
}

TEST_CASE("discounted payoff") {
  SUBCASE("zero controls and stock give zero") {
    GameParams p{1, {0.0}, {0.0}, 0.5, 0.25, 0.0};
    BeliefPriors pr{0.5, 1.0, 2.0, 1.0, {0.0}, {1.0}, {1.0}};
    const auto tr = simulate(p, pr, config(0.1, 0.01, 5.0),
                             generate_signals(p, {0.5, 0.1, {0.0}}, 0.1, 5.0, 1));
    CHECK(discounted_payoff(tr, p, 0, 5.0).value == 0.0);
  }
  SUBCASE("constant integrand integrates to c (1 - e^{-rho T}) / rho") {
    PerfectInfo f;
    f.p.tau = {0.0, 0.0};
    f.pr.tau0 = {0.0, 0.0};
    const auto tr = simulate(f.p, f.pr, config(0.1, 0.01, 40.0),
                             generate_signals(f.p, f.lw, 0.1, 40.0, 1));
    const double u0 = tr.u[0][0], U = u0 + tr.u[1][0];
    const double inst = u0 * (f.p.a[0] - U);
    const auto est20 = discounted_payoff(tr, f.p, 0, 20.0);
    const auto est40 = discounted_payoff(tr, f.p, 0, 40.0);
    CHECK(est40.value == doctest::Approx(inst * (1 - std::exp(-0.25 * 40)) / 0.25).epsilon(1e-6));
    CHECK(std::abs(est40.value - est20.value) <= est20.tail_bound);
  }
  CHECK_THROWS_AS(discounted_payoff(Trajectory{}, game(), 0, 1.0), Error);
}

TEST_CASE("stock stays non-negative when controls do") {
  GameParams p{5, std::vector<double>(5, 10.0), std::vector<double>(5, 1.1), 0.5, 0.25, 0.0};
  BeliefPriors pr{0.5, 1.0, 2.0, 1.0, std::vector<double>(5, 1.1), std::vector<double>(5, 0.01),
                  std::vector<double>(5, 0.25)};
  SignalLaw lw{0.5, 0.1, std::vector<double>(5, 0.25)};
  const auto tr = simulate(p, pr, config(0.05, 0.005, 5.0), generate_signals(p, lw, 0.05, 5.0, 3));
  const auto r = check_nonnegativity(p, {1.0, 1.2, 1.0}, tr);
  REQUIRE(r.realized_min_controls.has_value());
  for (double u : *r.realized_min_controls) CHECK(u >= 0.0);
  CHECK(*std::min_element(tr.S.begin(), tr.S.end()) >= 0.0);
}

TEST_CASE("clamping keeps controls non-negative") {
  GameParams p{2, {0.2, 3.0}, {1.0, 1.5}, 0.5, 0.25, 1.0};
  auto c = config(0.05, 0.005, 2.0);
  const auto signals = generate_signals(p, law(), 0.05, 2.0, 3);
  const auto raw = simulate(p, priors(), c, signals);
  CHECK(*std::min_element(raw.u[0].begin(), raw.u[0].end()) < 0.0);
  c.clamp_controls = true;
  const auto clamped = simulate(p, priors(), c, signals);
  CHECK(*std::min_element(clamped.u[0].begin(), clamped.u[0].end()) >= 0.0);
}

TEST_CASE("simulation input errors") {
  const auto signals = generate_signals(game(), law(), 0.02, 1.0, 1);
  CHECK_THROWS_AS(simulate(game(), priors(), config(0.02, 0.002, 2.0), signals), Error);
  CHECK_THROWS_AS(simulate(game(), priors(), config(0.02, 0.003, 1.0), signals), Error);
  auto bad = priors();
  bad.P0 = {1.0};
  CHECK_THROWS_AS(simulate(game(), bad, config(0.02, 0.002, 1.0), signals), Error);
  bad = priors();
  bad.alpha0 = 0.0;
  CHECK_THROWS_AS(simulate(game(), bad, config(0.02, 0.002, 1.0), signals), Error);
}
