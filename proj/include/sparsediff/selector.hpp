#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"
#include "sparsediff/lp.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/simulate.hpp"

namespace sparsediff {

/// Tuning rule gamma_n = K0 * Delta_n^{1/2 - alpha} under the standing
/// constraint 0 < zeta < 2*alpha < 1.  zeta only shapes experiment designs
/// (growth of log(1+p)); it never enters the estimator itself.
struct TuningRule {
  double k0 = 1.0;
  double alpha = 0.2;
  double zeta = 0.1;

  void validate() const {
    require(std::isfinite(k0) && k0 > 0.0, "TuningRule: K0 must be positive");
    require(alpha > 0.0 && alpha < 0.5, "TuningRule: alpha must lie in (0, 1/2)");
    require(zeta > 0.0 && zeta < 2.0 * alpha, "TuningRule: need 0 < zeta < 2*alpha");
  }
};

inline double gamma_n(const TuningRule& rule, int n) {
  rule.validate();
  require(n >= 1, "gamma_n: n must be >= 1");
  return rule.k0 * std::pow(1.0 / n, 0.5 - rule.alpha);
}

enum class SolverStatus { converged, max_iters, infeasible_lp, error };

inline std::string to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::max_iters: return "max_iters";
    case SolverStatus::infeasible_lp: return "infeasible_lp";
    case SolverStatus::error: return "error";
  }
  return "?";
}

inline SolverStatus solver_status_from_string(const std::string& s) {
  if (s == "converged") return SolverStatus::converged;
  if (s == "max_iters") return SolverStatus::max_iters;
  if (s == "infeasible_lp") return SolverStatus::infeasible_lp;
  return SolverStatus::error;
}

struct EstimateResult {
  Vector theta_hat;
  double gamma = 0.0;
  bool feasible = false;       // re-verified against the nonlinear constraint
  int iterations = 0;          // linearization rounds used
  double objective = 0.0;      // ||theta_hat||_1
  SolverStatus solver_status = SolverStatus::error;
  // Per-round (objective, nonlinear constraint violation) pairs.
  std::vector<std::pair<double, double>> trace;
};

struct EstimateOptions {
  int max_rounds = 50;
  double step_tol = 1e-8;
  double feasibility_slack = 1e-6;  // relative; absorbs simplex arithmetic noise
  double iterate_cap = 50.0;        // divergence guard on ||theta||_inf
};

/// Initializer from the log-linear regression  log(|dX_k|^2/Delta) ~ 2 Z'theta + noise,
/// recentred by E log chi^2_1 = digamma(1/2) + log 2, solved as a linear
/// Dantzig selector.  Deterministic given the path.
struct InitResult {
  Vector theta;
  bool degenerate = false;
};

inline InitResult log_regression_init(const ObservedPath& path) {
  path.validate();
  const int n = path.n;
  const int p = path.p();
  constexpr double kLogChiSq1Mean = -1.2703628454614782;  // digamma(1/2) + log 2

  if (path.z.cwiseAbs().maxCoeff() == 0.0) return {Vector::Zero(p), true};

  const double delta = path.delta();
  Vector y(n);
  for (int k = 0; k < n; ++k) {
    const double dx = path.x[k + 1] - path.x[k];
    y[k] = std::log(std::max(dx * dx / delta, 1e-300)) - kLogChiSq1Mean;
  }
  const Matrix design = 2.0 * path.z.leftCols(n).transpose();  // n x p

  const double mean = y.mean();
  const double sd = n > 1 ? std::sqrt((y.array() - mean).square().sum() / (n - 1)) : 0.0;
  if (!(sd > 0.0)) return {Vector::Zero(p), true};
  const double radius = 2.0 * std::sqrt(std::log(1.0 + p) / n) * sd;

  // || (1/n) D'(y - D theta) ||_inf <= radius  as  |c + A theta| <= r.
  const Vector c = design.transpose() * y / n;
  const Matrix a = -(design.transpose() * design) / n;
  const LpResult lp = lp_min_l1(a, c, Vector::Constant(p, radius));
  if (!lp.feasible) return {Vector::Zero(p), true};
  return {lp.theta, false};
}

/// Closed-form oracle for p = 1 with a constant nonzero covariate c:
/// the constraint |c e^{-2 theta c} Q - c| <= gamma is monotone in theta, so
/// the feasible set is an interval and the estimator is its point nearest 0.
inline double closed_form_1d(const ObservedPath& path, double gamma) {
  path.validate();
  require(path.p() == 1, "closed_form_1d: path must have p = 1");
  require(std::isfinite(gamma) && gamma > 0.0, "closed_form_1d: gamma must be positive");
  const int n = path.n;
  const double c0 = path.z(0, 0);
  require(c0 != 0.0, "closed_form_1d: covariate must be nonzero");
  for (int k = 0; k < n; ++k)
    require(std::abs(path.z(0, k) - c0) <= 1e-12 * std::max(1.0, std::abs(c0)),
            "closed_form_1d: covariate must be constant");

  const double delta = path.delta();
  double q = 0.0;
  for (int k = 0; k < n; ++k) {
    const double dx = path.x[k + 1] - path.x[k];
    q += dx * dx;
  }
  q /= n * delta;
  require(q > 0.0, "closed_form_1d: realized quadratic variation is zero");

  // Reduce c < 0 to c > 0 via theta -> -theta symmetry of |psi|.
  const double c = std::abs(c0);
  const double lo = std::log(c * q / (c + gamma)) / (2.0 * c);
  const double hi = (c - gamma > 0.0) ? std::log(c * q / (c - gamma)) / (2.0 * c) : kInf;
  double theta;
  if (lo <= 0.0 && 0.0 <= hi)
    theta = 0.0;
  else
    theta = (lo > 0.0) ? lo : hi;
  return c0 > 0.0 ? theta : -theta;
}

/// Dantzig selector via sequential linearization: round m solves the LP
///   min ||theta||_1  s.t.  |psi(theta_m) + V(theta_m) theta_m - V(theta_m) theta| <= gamma
/// from the log-regression start, then the final point is re-checked against
/// the true nonlinear constraint.  If iteration stops early, the best feasible
/// iterate seen is returned; feasibility is never inferred from the LP.
inline EstimateResult estimate(const ObservedPath& path, double gamma,
                               const EstimateOptions& opts = {}) {
  path.validate();
  require(std::isfinite(gamma) && gamma > 0.0, "estimate: gamma must be positive");
  const int p = path.p();

  EstimateResult res;
  res.gamma = gamma;

  const double feas_level = gamma * (1.0 + opts.feasibility_slack);
  auto violation = [&](const Vector& th) {
    return lq_norm(score(path, th, Drift::zero()), kInf) - gamma;
  };

  // 0 is the global minimizer whenever it is feasible.
  {
    const double v0 = violation(Vector::Zero(p));
    if (v0 <= 0.0) {
      res.theta_hat = Vector::Zero(p);
      res.feasible = true;
      res.iterations = 1;
      res.objective = 0.0;
      res.solver_status = SolverStatus::converged;
      res.trace.emplace_back(0.0, std::max(0.0, v0));
      return res;
    }
  }

  Vector theta = log_regression_init(path).theta;
  if (lq_norm(theta, kInf) > opts.iterate_cap) theta.setZero();

  std::optional<Vector> best_feasible;
  double best_objective = kInf;
  res.solver_status = SolverStatus::max_iters;

  int round = 0;
  while (round < opts.max_rounds) {
    ++round;
    const Vector psi = score(path, theta, Drift::zero());
    const Matrix v = hessian(path, theta, Drift::zero());
    const double theta_l1 = theta.cwiseAbs().sum();
    const double viol = psi.cwiseAbs().maxCoeff() - gamma;
    res.trace.emplace_back(theta_l1, std::max(0.0, viol));
    if (psi.cwiseAbs().maxCoeff() <= feas_level && theta_l1 < best_objective) {
      best_feasible = theta;
      best_objective = theta_l1;
    }

    const LpResult lp = lp_min_l1(-v, psi + v * theta, Vector::Constant(p, gamma));
    if (!lp.feasible) {
      res.solver_status = SolverStatus::infeasible_lp;
      break;
    }
    const double step = (lp.theta - theta).cwiseAbs().maxCoeff();
    theta = lp.theta;
    if (lq_norm(theta, kInf) > opts.iterate_cap) {
      res.solver_status = SolverStatus::max_iters;  // diverged; report honestly
      break;
    }
    if (step < opts.step_tol) {
      res.solver_status = SolverStatus::converged;
      break;
    }
  }
  res.iterations = round;

  const double final_viol = violation(theta);
  const bool final_feasible = final_viol <= gamma * opts.feasibility_slack;
  const double final_l1 = theta.cwiseAbs().sum();
  res.trace.emplace_back(final_l1, std::max(0.0, final_viol));

  if (final_feasible && final_l1 <= best_objective) {
    res.theta_hat = theta;
    res.feasible = true;
  } else if (best_feasible) {
    res.theta_hat = *best_feasible;
    res.feasible = true;
  } else {
    res.theta_hat = theta;
    res.feasible = false;
  }
  res.objective = res.theta_hat.cwiseAbs().sum();
  return res;
}

}  // namespace sparsediff
