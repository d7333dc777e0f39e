#pragma once

#include <cmath>
#include <cstdint>

#include "sparsediff/common.hpp"
#include "sparsediff/model.hpp"
#include "sparsediff/rng.hpp"

namespace sparsediff {

/// Bounded covariate process sampled on the fine grid (n*substeps + 1 points).
struct CovariatePath {
  int n = 0;
  int substeps = 1;
  Matrix values;  // p x (n*substeps + 1), entry (i,k) = Z^i at fine point k

  int fine_points() const { return n * substeps + 1; }
  double fine_delta() const { return 1.0 / (static_cast<double>(n) * substeps); }
};

/// The n+1 equidistant observations on [0,1] plus covariates at the same grid.
struct ObservedPath {
  int n = 0;
  Vector x;   // length n+1, x[k] = X at t_k = k/n
  Matrix z;   // p x (n+1), column k = Z at t_k
  std::uint64_t cov_seed = 0;
  std::uint64_t path_seed = 0;

  int p() const { return static_cast<int>(z.rows()); }
  double delta() const { return 1.0 / n; }

  void validate() const {
    require(n > 0, "ObservedPath: n must be positive");
    require(x.size() == n + 1, "ObservedPath: x must have n+1 entries");
    require(z.cols() == n + 1, "ObservedPath: z must have n+1 columns");
    require(x.allFinite() && z.allFinite(), "ObservedPath: non-finite data");
  }
};

/// Fine-grid record retained for diagnostics that need the latent Brownian
/// increments and integrand trajectories (score decomposition).
struct SimulationRecord {
  ObservedPath path;
  CovariatePath cov;
  Vector fine_x;   // n*substeps + 1
  Vector fine_dw;  // n*substeps Brownian increments on the fine grid
};

/// OU(mean reversion 1, volatility 1) started from its stationary law and
/// mapped through C*tanh(.), so |Z| < C everywhere; or, in constant mode,
/// one uniform draw on [-C, C] per coordinate held for all t.
inline CovariatePath generate_covariates(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  CovariatePath out;
  out.n = spec.n;
  out.substeps = spec.substeps;
  const int m = out.fine_points();
  out.values.resize(spec.p, m);
  const double c = spec.cov_bound;

  if (spec.covariates == CovariateMode::constant) {
    rng::Stream s = rng::stream(seed, rng::kDomainCovariate);
    for (int i = 0; i < spec.p; ++i) {
      const double v = c * (2.0 * s.uniform(i) - 1.0);
      out.values.row(i).setConstant(v);
    }
    return out;
  }

  const double dt = out.fine_delta();
  const double decay = std::exp(-dt);
  const double step_sd = std::sqrt((1.0 - decay * decay) / 2.0);  // exact OU transition
  const double stat_sd = std::sqrt(0.5);
  for (int i = 0; i < spec.p; ++i) {
    rng::Stream s = rng::stream(seed, rng::kDomainCovariate, static_cast<std::uint64_t>(i));
    double y = stat_sd * s.normal(0);
    out.values(i, 0) = c * std::tanh(y);
    for (int k = 1; k < m; ++k) {
      y = decay * y + step_sd * s.normal(k);
      out.values(i, k) = c * std::tanh(y);
    }
  }
  return out;
}

namespace detail {

inline SimulationRecord simulate_impl(const ModelSpec& spec, const CovariatePath& cov,
                                      std::uint64_t seed, bool keep_fine) {
  spec.validate();
  require(cov.n == spec.n && cov.substeps == spec.substeps &&
              cov.values.rows() == spec.p,
          "simulate_path: covariate path does not match spec dimensions");

  const int m = cov.n * cov.substeps;  // fine steps
  const double dt = cov.fine_delta();
  const double sqrt_dt = std::sqrt(dt);

  // Diffusion coefficient exp(theta0' Z) on the fine grid, computed once.
  Eigen::RowVectorXd expo = (spec.theta0.transpose() * cov.values).array().exp();

  rng::Stream bs = rng::stream(seed, rng::kDomainBrownian);
  SimulationRecord rec;
  if (keep_fine) {
    rec.fine_x.resize(m + 1);
    rec.fine_dw.resize(m);
  }

  ObservedPath& obs = rec.path;
  obs.n = spec.n;
  obs.x.resize(spec.n + 1);
  obs.cov_seed = 0;  // caller fills; generation seed is not visible here
  obs.path_seed = seed;

  double x = spec.x0;
  obs.x[0] = x;
  if (keep_fine) rec.fine_x[0] = x;
  for (int k = 0; k < m; ++k) {
    const double dw = sqrt_dt * bs.normal(static_cast<std::uint64_t>(k));
    x += spec.drift(x) * dt + expo[k] * dw;
    if (keep_fine) {
      rec.fine_dw[k] = dw;
      rec.fine_x[k + 1] = x;
    }
    if ((k + 1) % cov.substeps == 0) obs.x[(k + 1) / cov.substeps] = x;
  }

  // Covariate subsample at observation times.
  obs.z.resize(spec.p, spec.n + 1);
  for (int k = 0; k <= spec.n; ++k) obs.z.col(k) = cov.values.col(k * cov.substeps);

  if (keep_fine) rec.cov = cov;
  return rec;
}

}  // namespace detail

/// Euler-Maruyama on the fine grid, subsampled to the n+1 observation times.
/// The Brownian stream is independent of the covariate stream by key domain.
inline ObservedPath simulate_path(const ModelSpec& spec, const CovariatePath& cov,
                                  std::uint64_t seed) {
  return detail::simulate_impl(spec, cov, seed, false).path;
}

/// Same simulation, retaining the fine grid for the score decomposition.
inline SimulationRecord simulate_record(const ModelSpec& spec, const CovariatePath& cov,
                                        std::uint64_t seed) {
  return detail::simulate_impl(spec, cov, seed, true);
}

/// Convenience wrapper: covariates and path from one seed, two stream domains.
inline ObservedPath simulate(const ModelSpec& spec, std::uint64_t seed) {
  CovariatePath cov = generate_covariates(spec, seed);
  ObservedPath path = simulate_path(spec, cov, seed);
  path.cov_seed = seed;
  return path;
}

}  // namespace sparsediff
