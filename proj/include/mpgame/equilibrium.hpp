#pragma once

#include <optional>
#include <vector>

namespace mpgame {

inline constexpr double kSingularEps = 1e-9;

// Linear-state pollution game: S' = x (sum u) - (1 - x delta) S, player i
// maximizes the discounted integral of u_i (a_i - sum_j u_j) - tau_i S.
struct GameParams {
  int n = 1;
  std::vector<double> a;    // emission intercepts a_i
  std::vector<double> tau;  // true cost types tau_i
  double delta = 0.5;       // retention fraction
  double rho = 0.25;        // discount rate
  double S0 = 0.0;          // initial stock

  double a_total() const;
};

void validate(const GameParams& p);

struct BeliefProfile {
  double x_bar = 0.0;            // expected absorption factor
  std::vector<double> tau_bar;   // public estimates of every player's type
};

struct EquilibriumSolution {
  std::vector<double> f1;
  double f2 = 0.0;               // shared coefficient of the own type
  std::vector<double> A;         // value-function slopes
  std::vector<double> controls;  // u_i = f1_i + f2 tau_i
  double foc_residual = 0.0;
  double condition = 1.0;        // 2-norm condition number of the f1 system

  // 2 f2: the slope multiplying types in the controls.
  double effective_slope() const { return 2.0 * f2; }
};

// Printed coefficient -x/(1 - x delta - rho). Throws kSingular when the
// denominator is within kSingularEps of zero.
double c_bar(double x_bar, double delta, double rho);

// Slope A_i of V_i = A_i S + B_i obtained by matching the S coefficients of
// the HJB equation. The maximized right-hand side is sampled at two stock
// levels and two trial slopes, and the resulting linear equation in A_i is
// solved; no closed form is assumed.
double value_slope(double tau_i, double x_bar, double delta, double rho);

// The printed slope -tau_i/(1 - x delta - rho), for comparison only.
double value_slope_printed(double tau_i, double x_bar, double delta, double rho);

// rho A - (S coefficient of the maximized HJB right side), evaluated from
// the analytic S coefficient -tau_i - A (1 - x delta). Zero at a matched slope.
double slope_matching_residual(double A, double tau_i, double x_bar, double delta, double rho);

// max_i |a_i - 2 u_i - sum_{j != i} ubar_j + A_i x| with u_i = f1_i + f2 tau_i
// and ubar_j = f1_j + f2 tau_bar_j.
double foc_residual(const GameParams& p, const BeliefProfile& b, const std::vector<double>& f1,
                    double f2, const std::vector<double>& A);

// Feedback equilibrium under frozen beliefs; controls are state independent.
EquilibriumSolution solve_equilibrium(const GameParams& p, const BeliefProfile& b);

// Value intercepts B_i from matching constant terms. Controls never depend on
// these; they complete the value-function report.
std::vector<double> value_intercepts(const GameParams& p, const BeliefProfile& b,
                                     const EquilibriumSolution& sol);

// Printed closed form
//   u_i = a_i - a/(n+1) - (n^2-n+2)/(4(n+1)) c sum_j tau_bar_j + c ((n/2) tau_bar_i + tau_i)/2
// with c = c_bar(x_bar, delta, rho).
std::vector<double> paper_closed_form(const GameParams& p, const BeliefProfile& b);
std::vector<double> paper_closed_form_with(const GameParams& p, const std::vector<double>& tau_bar,
                                           double c);

// Printed full-information formula
//   u_i = a_i - a/(n+1) - (n^2-n+2)/(4(n+1)) c sum_j tau_j + ((n+2)/4) c tau_i
// with c = -mu/(1 - mu delta - rho).
std::vector<double> known_state_printed(const GameParams& p, double mu_true);

struct KnownStateResult {
  std::vector<double> controls;                 // solver at x = mu, tau_bar = tau
  std::optional<std::vector<double>> printed;   // empty when the printed c is singular
  std::vector<double> deltas;                   // printed - solver (empty when no printed)
  EquilibriumSolution solution;
};

KnownStateResult known_state_equilibrium(const GameParams& p, double mu_true);

// Interpretation of the undefined q/Q symbols in the printed type condition:
// configured lower/upper bounds on every type and type estimate.
struct TypeBounds {
  double tau_lower = 0.0;
  double tau_upper = 0.0;
  double x_bar_max = 1.0;  // upper bound on the absorption estimate
};

struct NonnegativityReport {
  bool intercept_condition = false;  // min a - n/(n+1) max a > 0
  bool type_condition = false;       // printed q/Q condition
  bool discount_condition = false;   // 1 - rho >= delta > 0
  // Sufficient condition for the solver's controls over the belief box
  // x in [0, x_bar_max], tau, tau_bar in [tau_lower, tau_upper]:
  //   min a - n max a/(n+1) >= c_max (n Q - (n-1) q)/(n+1).
  bool solver_margin_condition = false;
  double intercept_margin = 0.0;
  double type_margin = 0.0;
  double solver_margin = 0.0;
  std::optional<std::vector<double>> realized_min_controls;

  bool printed_conditions() const {
    return intercept_condition && type_condition && discount_condition;
  }
  bool passes() const { return printed_conditions() && solver_margin_condition; }
};

NonnegativityReport check_nonnegativity(const GameParams& p, const TypeBounds& bounds);

}  // namespace mpgame
