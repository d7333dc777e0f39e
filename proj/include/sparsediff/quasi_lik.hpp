#pragma once

#include <cmath>
#include <numbers>

#include "sparsediff/common.hpp"
#include "sparsediff/model.hpp"
#include "sparsediff/simulate.hpp"

namespace sparsediff {

namespace detail {

// r_k = X_{t_k} - X_{t_{k-1}} - b(X_{t_{k-1}}) * Delta, k = 1..n.
inline Vector drift_adjusted_increments(const ObservedPath& path, const Drift& drift) {
  const int n = path.n;
  const double delta = path.delta();
  Vector r(n);
  for (int k = 0; k < n; ++k)
    r[k] = path.x[k + 1] - path.x[k] - drift(path.x[k]) * delta;
  return r;
}

// exp(-2 theta' Z_{t_{k-1}}) for k = 1..n.
inline Vector inv_sq_diffusion(const ObservedPath& path, const Vector& theta) {
  require(theta.size() == path.z.rows(), "theta dimension does not match path");
  require(theta.allFinite(), "theta must be finite");
  return (-2.0 * (theta.transpose() * path.z.leftCols(path.n)).transpose().array()).exp();
}

}  // namespace detail

/// Log quasi-likelihood l_n(b;theta) of the Euler-discretized model.
inline double log_quasi_likelihood(const ObservedPath& path, const Vector& theta,
                                   const Drift& drift = Drift::zero()) {
  path.validate();
  const int n = path.n;
  const double delta = path.delta();
  const Vector r = detail::drift_adjusted_increments(path, drift);
  const Vector e = detail::inv_sq_diffusion(path, theta);  // exp(-2 theta'Z)
  double l = 0.0;
  for (int k = 0; k < n; ++k) {
    // -0.5*log(2*pi*exp(2 theta'Z)*Delta) - r^2 / (2*exp(2 theta'Z)*Delta)
    l += -0.5 * (std::log(2.0 * std::numbers::pi * delta) - std::log(e[k])) -
         r[k] * r[k] * e[k] / (2.0 * delta);
  }
  return l;
}

/// Normalized score psi_n(b;theta) = l_n'(b;theta) / n.
inline Vector score(const ObservedPath& path, const Vector& theta,
                    const Drift& drift = Drift::zero()) {
  path.validate();
  const int n = path.n;
  const double delta = path.delta();
  const Vector r = detail::drift_adjusted_increments(path, drift);
  const Vector e = detail::inv_sq_diffusion(path, theta);
  const auto z = path.z.leftCols(n);
  // (1/(n*Delta)) * sum_k Z_k (e_k r_k^2 - Delta)
  Vector coef = (e.array() * r.array().square() - delta).matrix();
  return z * coef / (n * delta);
}

/// Negative normalized Hessian V_n(b;theta) = -l_n''(b;theta) / n.
/// Nonnegative definite by construction (weighted Gram matrix).
inline Matrix hessian(const ObservedPath& path, const Vector& theta,
                      const Drift& drift = Drift::zero()) {
  path.validate();
  const int n = path.n;
  const double delta = path.delta();
  const Vector r = detail::drift_adjusted_increments(path, drift);
  const Vector e = detail::inv_sq_diffusion(path, theta);
  const auto z = path.z.leftCols(n);
  Vector w = (2.0 / (n * delta)) * (e.array() * r.array().square()).matrix();
  Matrix v = z * w.asDiagonal() * z.transpose();
  return 0.5 * (v + v.transpose());  // exact symmetry under rounding
}

/// Surrogate matrix J_n = (2/n) sum_k Z_{t_{k-1}} Z_{t_{k-1}}'; theta-free.
inline Matrix j_matrix(const ObservedPath& path) {
  path.validate();
  const auto z = path.z.leftCols(path.n);
  Matrix j = (2.0 / path.n) * (z * z.transpose());
  return 0.5 * (j + j.transpose());
}

/// epsilon_n = || V_n(0;theta0) - J_n ||_inf  (entrywise sup norm).
inline double epsilon_n(const ObservedPath& path, const Vector& theta0) {
  return entrywise_sup_norm(hessian(path, theta0, Drift::zero()) - j_matrix(path));
}

/// g(x) = (e^{2x} - 1)/x, continuously extended to g(0) = 2.  A short Taylor
/// series takes over for |x| < 1e-6 where the quotient cancels badly.
inline double g_function(double x) {
  require(std::isfinite(x), "g_function: non-finite input");
  if (std::abs(x) < 1e-6)
    return 2.0 + x * (2.0 + x * (4.0 / 3.0 + x * (2.0 / 3.0)));
  return std::expm1(2.0 * x) / x;
}

/// nu = min of g over [-a, a].  g is strictly increasing (checked by a
/// property test, not assumed silently), so the minimum sits at -a.
inline double nu_factor(double a) {
  require(std::isfinite(a) && a > 0.0, "nu_factor: radius must be finite and positive");
  return g_function(-a);
}

/// Grid fallback for nu: direct minimization over a dense grid on [-a, a].
inline double nu_factor_grid(double a, int points = 10000) {
  require(std::isfinite(a) && a > 0.0, "nu_factor_grid: radius must be positive");
  require(points >= 2, "nu_factor_grid: need at least 2 points");
  double best = kInf;
  for (int i = 0; i < points; ++i) {
    const double x = -a + 2.0 * a * i / (points - 1);
    best = std::min(best, g_function(x));
  }
  return best;
}

/// Evaluation bundle: score, Hessian, surrogate, and their entrywise gap.
struct ScoreReport {
  Vector psi;
  Matrix v_matrix;
  Matrix j_mat;
  double eps = 0.0;  // entrywise sup norm of v_matrix - j_mat
  Vector theta_eval;
  Drift b_mode;
};

inline ScoreReport make_score_report(const ObservedPath& path, const Vector& theta,
                                     const Drift& drift = Drift::zero()) {
  ScoreReport r;
  r.psi = score(path, theta, drift);
  r.v_matrix = hessian(path, theta, drift);
  r.j_mat = j_matrix(path);
  r.eps = entrywise_sup_norm(r.v_matrix - r.j_mat);
  r.theta_eval = theta;
  r.b_mode = drift;
  return r;
}

}  // namespace sparsediff
