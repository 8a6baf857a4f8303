#include "mpgame/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mpgame/error.hpp"

namespace mpgame {
namespace {

void check_beliefs(const GameParams& p, const BeliefProfile& b) {
  require(std::isfinite(b.x_bar), ErrorKind::kNonFinite, "belief x_bar must be finite");
  require(b.tau_bar.size() == static_cast<std::size_t>(p.n), ErrorKind::kInvalidArgument,
          "belief profile needs one tau_bar per player");
  for (double v : b.tau_bar) {
    require(std::isfinite(v), ErrorKind::kNonFinite, "belief tau_bar must be finite");
  }
}

// Right-hand side of the HJB equation for V = A S + B, maximized over the
// player's own control. Only the S dependence matters for slope matching, so
// the opponents' aggregate and the intercept enter as fixed numbers.
struct HjbSlice {
  double tau_i;
  double x_bar;
  double delta;
  double a_i = 0.0;
  double others = 0.0;

  double maximized(double S, double A) const {
    // u (a_i - u - others) + A x u is concave in u with vertex at
    // u = (a_i - others + A x)/2.
    const double linear = a_i - others + A * x_bar;
    const double u = 0.5 * linear;
    return u * (a_i - u - others) - tau_i * S +
           A * (x_bar * (u + others) - (1.0 - x_bar * delta) * S);
  }

  double s_coefficient(double A) const { return maximized(1.0, A) - maximized(0.0, A); }
};

// I + 11^T depends only on n; the simulator solves it at every RK4 stage.
struct CouplingSystem {
  int n = 0;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  double condition = 1.0;
};

const CouplingSystem& coupling_system(int n) {
  thread_local CouplingSystem cached;
  if (cached.n != n) {
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) + Eigen::MatrixXd::Ones(n, n);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    cached.condition = sv[0] / sv[sv.size() - 1];
    cached.lu.compute(M);
    cached.n = n;
  }
  return cached;
}

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

double GameParams::a_total() const { return sum(a); }

void validate(const GameParams& p) {
  require(p.n >= 1, ErrorKind::kInvalidArgument, "player count n must be >= 1");
  const auto n = static_cast<std::size_t>(p.n);
  require(p.a.size() == n, ErrorKind::kInvalidArgument, "need one a_i per player");
  require(p.tau.size() == n, ErrorKind::kInvalidArgument, "need one tau_i per player");
  for (std::size_t i = 0; i < n; ++i) {
    require(std::isfinite(p.a[i]) && std::isfinite(p.tau[i]), ErrorKind::kNonFinite,
            "a_i and tau_i must be finite");
  }
  require(p.delta > 0.0 && p.delta <= 1.0, ErrorKind::kInvalidArgument, "delta must be in (0, 1]");
  require(p.rho > 0.0 && std::isfinite(p.rho), ErrorKind::kInvalidArgument, "rho must be > 0");
  require(p.S0 >= 0.0 && std::isfinite(p.S0), ErrorKind::kInvalidArgument, "S0 must be >= 0");
}

double c_bar(double x_bar, double delta, double rho) {
  const double denom = 1.0 - x_bar * delta - rho;
  if (std::abs(denom) <= kSingularEps) {
    fail(ErrorKind::kSingular,
         "degenerate discounting: |1 - x delta - rho| = " + std::to_string(std::abs(denom)));
  }
  return -x_bar / denom;
}

double value_slope(double tau_i, double x_bar, double delta, double rho) {
  const HjbSlice slice{tau_i, x_bar, delta};
  // The S coefficient is affine in A: k(A) = k0 + k1 A. Match rho A = k(A).
  const double k0 = slice.s_coefficient(0.0);
  const double k1 = slice.s_coefficient(1.0) - k0;
  const double denom = rho - k1;
  if (std::abs(denom) <= kSingularEps) {
    fail(ErrorKind::kSingular, "singular slope-matching equation: |rho + 1 - x delta| = " +
                                   std::to_string(std::abs(denom)));
  }
  return k0 / denom;
}

double value_slope_printed(double tau_i, double x_bar, double delta, double rho) {
  const double denom = 1.0 - x_bar * delta - rho;
  require(std::abs(denom) > kSingularEps, ErrorKind::kSingular,
          "printed slope singular: 1 - x delta - rho = 0");
  return -tau_i / denom;
}

double slope_matching_residual(double A, double tau_i, double x_bar, double delta, double rho) {
  return rho * A - (-tau_i - A * (1.0 - x_bar * delta));
}

double foc_residual(const GameParams& p, const BeliefProfile& b, const std::vector<double>& f1,
                    double f2, const std::vector<double>& A) {
  const auto n = static_cast<std::size_t>(p.n);
  std::vector<double> believed(n);
  for (std::size_t j = 0; j < n; ++j) believed[j] = f1[j] + f2 * b.tau_bar[j];
  const double believed_total = sum(believed);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = f1[i] + f2 * p.tau[i];
    const double r = p.a[i] - 2.0 * u - (believed_total - believed[i]) + A[i] * b.x_bar;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

EquilibriumSolution solve_equilibrium(const GameParams& p, const BeliefProfile& b) {
  validate(p);
  check_beliefs(p, b);
  const auto n = static_cast<std::size_t>(p.n);

  EquilibriumSolution sol;
  sol.A.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.A[i] = value_slope(p.tau[i], b.x_bar, p.delta, p.rho);
  // A_i is linear in tau_i, so the own-type coefficient of u_i = (... + A_i x)/2
  // is the same for every player.
  sol.f2 = 0.5 * b.x_bar * value_slope(1.0, b.x_bar, p.delta, p.rho);

  // f1_i + sum_j f1_j = a_i - f2 sum_{j != i} tau_bar_j
  const double tau_bar_total = sum(b.tau_bar);
  Eigen::VectorXd rhs(p.n);
  for (std::size_t i = 0; i < n; ++i) {
    rhs[static_cast<Eigen::Index>(i)] = p.a[i] - sol.f2 * (tau_bar_total - b.tau_bar[i]);
  }
  const CouplingSystem& system = coupling_system(p.n);
  sol.condition = system.condition;
  if (!(std::isfinite(sol.condition) && sol.condition < 1e12)) {
    fail(ErrorKind::kSingular,
         "singular equilibrium system, condition estimate " + std::to_string(sol.condition));
  }
  const Eigen::VectorXd f1 = system.lu.solve(rhs);

  sol.f1.assign(f1.data(), f1.data() + f1.size());
  sol.controls.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.controls[i] = sol.f1[i] + sol.f2 * p.tau[i];
  sol.foc_residual = foc_residual(p, b, sol.f1, sol.f2, sol.A);
  return sol;
}

std::vector<double> value_intercepts(const GameParams& p, const BeliefProfile& b,
                                     const EquilibriumSolution& sol) {
  const auto n = static_cast<std::size_t>(p.n);
  std::vector<double> believed(n);
  for (std::size_t j = 0; j < n; ++j) believed[j] = sol.f1[j] + sol.f2 * b.tau_bar[j];
  const double believed_total = sum(believed);
  std::vector<double> B(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double others = believed_total - believed[i];
    const double u = sol.controls[i];
    B[i] = (u * (p.a[i] - u - others) + sol.A[i] * b.x_bar * (u + others)) / p.rho;
  }
  return B;
}

std::vector<double> paper_closed_form_with(const GameParams& p, const std::vector<double>& tau_bar,
                                           double c) {
  const auto n = static_cast<std::size_t>(p.n);
  const double nn = static_cast<double>(p.n);
  const double a = p.a_total();
  const double tau_bar_total = sum(tau_bar);
  const double coupling = (nn * nn - nn + 2.0) / (4.0 * (nn + 1.0));
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = p.a[i] - a / (nn + 1.0) - coupling * c * tau_bar_total +
           0.5 * c * (0.5 * nn * tau_bar[i] + p.tau[i]);
  }
  return u;
}

std::vector<double> paper_closed_form(const GameParams& p, const BeliefProfile& b) {
  validate(p);
  check_beliefs(p, b);
  return paper_closed_form_with(p, b.tau_bar, c_bar(b.x_bar, p.delta, p.rho));
}

std::vector<double> known_state_printed(const GameParams& p, double mu_true) {
  validate(p);
  const double c = c_bar(mu_true, p.delta, p.rho);
  const auto n = static_cast<std::size_t>(p.n);
  const double nn = static_cast<double>(p.n);
  const double a = p.a_total();
  const double tau_total = sum(p.tau);
  const double coupling = (nn * nn - nn + 2.0) / (4.0 * (nn + 1.0));
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = p.a[i] - a / (nn + 1.0) - coupling * c * tau_total + ((nn + 2.0) / 4.0) * c * p.tau[i];
  }
  return u;
}

KnownStateResult known_state_equilibrium(const GameParams& p, double mu_true) {
  KnownStateResult out;
  out.solution = solve_equilibrium(p, BeliefProfile{mu_true, p.tau});
  out.controls = out.solution.controls;
  if (std::abs(1.0 - mu_true * p.delta - p.rho) > kSingularEps) {
    out.printed = known_state_printed(p, mu_true);
    out.deltas.resize(out.controls.size());
    for (std::size_t i = 0; i < out.controls.size(); ++i) {
      out.deltas[i] = (*out.printed)[i] - out.controls[i];
    }
  }
  return out;
}

NonnegativityReport check_nonnegativity(const GameParams& p, const TypeBounds& bounds) {
  NonnegativityReport r;
  const double nn = static_cast<double>(p.n);
  const auto [a_min_it, a_max_it] = std::minmax_element(p.a.begin(), p.a.end());
  const double a_min = p.a.empty() ? 0.0 : *a_min_it;
  const double a_max = p.a.empty() ? 0.0 : *a_max_it;

  r.intercept_margin = a_min - nn / (nn + 1.0) * a_max;
  r.intercept_condition = r.intercept_margin > 0.0;

  const double coupling = (nn * nn - nn + 2.0) / (4.0 * (nn + 1.0));
  r.type_margin = coupling * nn * bounds.tau_lower - (0.5 * nn + 1.0) * bounds.tau_upper;
  r.type_condition = r.type_margin > 0.0;

  r.discount_condition = (1.0 - p.rho >= p.delta) && p.delta > 0.0;

  // Controls are a_i - a/(n+1) + c (-sum tau_bar/(n+1) + (tau_bar_i + tau_i)/2)
  // with c = -x/(1 - x delta + rho) <= 0 on the belief box.
  const double decay = 1.0 - bounds.x_bar_max * p.delta + p.rho;
  if (decay > kSingularEps && bounds.x_bar_max >= 0.0) {
    const double c_max = bounds.x_bar_max / decay;
    const double exposure =
        std::max(0.0, (nn * bounds.tau_upper - (nn - 1.0) * bounds.tau_lower) / (nn + 1.0));
    r.solver_margin = r.intercept_margin - c_max * exposure;
    r.solver_margin_condition = r.solver_margin >= 0.0;
  } else {
    r.solver_margin = -std::numeric_limits<double>::infinity();
    r.solver_margin_condition = false;
  }
  return r;
}

}  // namespace mpgame
