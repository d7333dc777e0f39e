#pragma once

#include <cmath>

#include "sparsediff/common.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/simulate.hpp"

namespace sparsediff {

/// Score decomposition psi_n(b;theta0) = A + B + C with C = D + E, the
/// drift/stochastic/Brownian split.  A and B carry the drift increments, C
/// the stochastic-integral square, D the integrand-vs-constant gap and E the
/// pure Brownian fluctuation.  Time integrals are fine-grid left-point
/// quadrature with the simulator's own substeps, so A+B+C reproduces the
/// observed-data score exactly up to rounding when evaluated at the
/// generating (theta0, drift).
struct ScoreDecomposition {
  Vector a, b, c, d, e;

  Vector abc_sum() const { return a + b + c; }
  Vector de_sum() const { return d + e; }
};

inline ScoreDecomposition score_decomposition(const SimulationRecord& rec,
                                              const Vector& theta0, const Drift& drift) {
  require(rec.fine_x.size() > 0 && rec.fine_dw.size() > 0 && rec.cov.values.size() > 0,
          "score_decomposition: fine simulation record was not retained");
  const ObservedPath& path = rec.path;
  path.validate();
  const int n = path.n;
  const int m = rec.cov.substeps;
  const double delta = path.delta();
  const double fine_dt = rec.cov.fine_delta();
  require(theta0.size() == path.z.rows(), "score_decomposition: theta0 dimension mismatch");
  require(rec.fine_x.size() == static_cast<long>(n) * m + 1 &&
              rec.fine_dw.size() == static_cast<long>(n) * m,
          "score_decomposition: fine record does not match path dimensions");

  // exp(theta0' Z) on the fine grid, exp(-2 theta0' Z) at observation points.
  Eigen::RowVectorXd fine_expo = (theta0.transpose() * rec.cov.values).array().exp();
  const Vector inv_sq = detail::inv_sq_diffusion(path, theta0);

  const int p = path.p();
  ScoreDecomposition out;
  out.a = Vector::Zero(p);
  out.b = Vector::Zero(p);
  out.c = Vector::Zero(p);
  out.d = Vector::Zero(p);
  out.e = Vector::Zero(p);

  const double scale = 1.0 / (n * delta);
  for (int k = 0; k < n; ++k) {
    const double b_left = drift(path.x[k]);
    double drift_gap = 0.0;   // int (b(X_s) - b(X_{t_{k-1}})) ds
    double stoch = 0.0;       // int exp(theta0'Z_s) dW_s
    double dw_sum = 0.0;      // W_{t_k} - W_{t_{k-1}}
    for (int j = k * m; j < (k + 1) * m; ++j) {
      drift_gap += (drift(rec.fine_x[j]) - b_left) * fine_dt;
      stoch += fine_expo[j] * rec.fine_dw[j];
      dw_sum += rec.fine_dw[j];
    }
    const double ek = inv_sq[k];
    const Vector zk = path.z.col(k);
    out.a += scale * ek * drift_gap * drift_gap * zk;
    out.b += scale * 2.0 * ek * drift_gap * stoch * zk;
    out.c += scale * (ek * stoch * stoch - delta) * zk;
    out.d += scale * (ek * stoch * stoch - dw_sum * dw_sum) * zk;
    out.e += scale * (dw_sum * dw_sum - delta) * zk;
  }
  return out;
}

}  // namespace sparsediff
