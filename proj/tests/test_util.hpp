#pragma once

// Shared helpers for the test suites: synthetic path builders, finite
// difference oracles, and a Kolmogorov-Smirnov test against N(0,1).

#include <algorithm>
#include <cmath>
#include <vector>

#include "sparsediff/model.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/rng.hpp"
#include "sparsediff/simulate.hpp"

namespace test_util {

using sparsediff::Matrix;
using sparsediff::ObservedPath;
using sparsediff::Vector;

// Synthetic observed path: bounded covariates, Gaussian-ish increments.
// Valid input for the quasi-likelihood operations without running the SDE.
inline ObservedPath synthetic_path(int n, int p, std::uint64_t seed, double z_bound = 1.0) {
  sparsediff::rng::Stream zs = sparsediff::rng::stream(seed, 0xabc);
  sparsediff::rng::Stream xs = sparsediff::rng::stream(seed, 0xdef);
  ObservedPath path;
  path.n = n;
  path.z.resize(p, n + 1);
  std::uint64_t c = 0;
  for (int i = 0; i < p; ++i)
    for (int k = 0; k <= n; ++k) path.z(i, k) = z_bound * (2.0 * zs.uniform(c++) - 1.0);
  path.x.resize(n + 1);
  path.x[0] = 0.0;
  const double sd = std::sqrt(1.0 / n);
  for (int k = 0; k < n; ++k) path.x[k + 1] = path.x[k] + sd * xs.normal(k);
  return path;
}

inline Vector random_theta(int p, std::uint64_t seed, double bound = 1.0) {
  sparsediff::rng::Stream s = sparsediff::rng::stream(seed, 0x7e7a);
  Vector theta(p);
  for (int i = 0; i < p; ++i) theta[i] = bound * (2.0 * s.uniform(i) - 1.0);
  return theta;
}

// Central finite differences of l_n/n; the independent oracle for score().
inline Vector fd_score(const ObservedPath& path, const Vector& theta,
                       const sparsediff::Drift& drift, double h = 1e-6) {
  const int p = static_cast<int>(theta.size());
  Vector g(p);
  for (int i = 0; i < p; ++i) {
    Vector tp = theta, tm = theta;
    tp[i] += h;
    tm[i] -= h;
    g[i] = (sparsediff::log_quasi_likelihood(path, tp, drift) -
            sparsediff::log_quasi_likelihood(path, tm, drift)) /
           (2.0 * h * path.n);
  }
  return g;
}

// Central second differences of l_n/n; oracle for -hessian().
inline Matrix fd_hessian(const ObservedPath& path, const Vector& theta,
                         const sparsediff::Drift& drift, double h = 1e-4) {
  const int p = static_cast<int>(theta.size());
  Matrix out(p, p);
  auto l = [&](const Vector& t) { return sparsediff::log_quasi_likelihood(path, t, drift); };
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= i; ++j) {
      Vector tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[i] += h; tpp[j] += h;
      tpm[i] += h; tpm[j] -= h;
      tmp[i] -= h; tmp[j] += h;
      tmm[i] -= h; tmm[j] -= h;
      out(i, j) = out(j, i) =
          (l(tpp) - l(tpm) - l(tmp) + l(tmm)) / (4.0 * h * h * path.n);
    }
  }
  return out;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided KS p-value for a sample against N(0,1), with the usual
// finite-sample correction of the asymptotic Kolmogorov distribution.
inline double ks_pvalue_normal(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = normal_cdf(xs[i]);
    d = std::max({d, std::abs(f - (i + 1) / n), std::abs(f - i / n)});
  }
  const double t = d * (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
  double p = 0.0;
  for (int k = 1; k <= 100; ++k)
    p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * t * t);
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace test_util
