#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"

namespace sparsediff {

// Drift menu: all globally Lipschitz with a known constant.
enum class DriftKind { zero, linear, tanh_bounded };

struct Drift {
  DriftKind kind = DriftKind::zero;
  double param = 0.0;  // lambda for linear b(x) = -lambda*x, a for a*tanh(x)

  double operator()(double x) const {
    switch (kind) {
      case DriftKind::zero: return 0.0;
      case DriftKind::linear: return -param * x;
      case DriftKind::tanh_bounded: return param * std::tanh(x);
    }
    return 0.0;
  }

  double lipschitz() const { return kind == DriftKind::zero ? 0.0 : std::abs(param); }

  static Drift zero() { return {DriftKind::zero, 0.0}; }
  static Drift linear(double lambda) {
    require(lambda >= 0.0, "drift: linear rate must be >= 0");
    return {DriftKind::linear, lambda};
  }
  static Drift tanh_bounded(double a) { return {DriftKind::tanh_bounded, a}; }

  std::string describe() const {
    switch (kind) {
      case DriftKind::zero: return "zero";
      case DriftKind::linear: return "linear " + std::to_string(param);
      case DriftKind::tanh_bounded: return "tanh " + std::to_string(param);
    }
    return "?";
  }
};

enum class CovariateMode { ou_tanh, constant };

/// The true model: sparse theta0, drift choice, covariate bound, and the
/// discretization sizes (n observation intervals on [0,1], `substeps` fine
/// simulation steps per interval).
struct ModelSpec {
  int p = 1;              // ambient dimension
  int n = 100;            // observation intervals; Delta_n = 1/n
  int substeps = 50;      // fine steps per observation interval
  Vector theta0;          // length p
  Drift drift;
  CovariateMode covariates = CovariateMode::ou_tanh;
  double cov_bound = 1.0;  // uniform bound C on every covariate coordinate
  double x0 = 0.0;

  void validate() const {
    require(p > 0, "ModelSpec: p must be positive");
    require(n > 0, "ModelSpec: n must be positive");
    require(substeps > 0, "ModelSpec: substeps must be positive");
    require(cov_bound > 0.0, "ModelSpec: cov_bound must be positive");
    require(theta0.size() == p, "ModelSpec: theta0 must have length p");
    require(theta0.allFinite(), "ModelSpec: theta0 must be finite");
  }

  std::vector<int> support() const {
    std::vector<int> t0;
    for (int i = 0; i < theta0.size(); ++i)
      if (theta0[i] != 0.0) t0.push_back(i);
    return t0;
  }

  int sparsity() const { return static_cast<int>(support().size()); }

  double delta() const { return 1.0 / n; }

  // FNV-1a over the canonical byte serialization; identifies the spec in
  // path-file headers.
  std::uint64_t digest() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto feed = [&h](const void* data, std::size_t len) {
      const auto* b = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ull;
      }
    };
    auto feed_d = [&](double v) { feed(&v, sizeof v); };
    auto feed_i = [&](std::int64_t v) { feed(&v, sizeof v); };
    feed_i(p);
    feed_i(n);
    feed_i(substeps);
    feed_i(static_cast<std::int64_t>(drift.kind));
    feed_d(drift.param);
    feed_i(static_cast<std::int64_t>(covariates));
    feed_d(cov_bound);
    feed_d(x0);
    for (int i = 0; i < theta0.size(); ++i) feed_d(theta0[i]);
    return h;
  }
};

}  // namespace sparsediff
