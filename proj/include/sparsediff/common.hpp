#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsediff {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Thrown when an on-disk artifact does not match its documented layout.
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on filesystem failures (open/read/write).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Entrywise sup norm of a matrix: sup_i sup_j |A_ij|.  Not the operator norm.
inline double entrywise_sup_norm(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

// l_q norm for q in [1, inf]; pass q = kInf for the sup norm.
inline double lq_norm(const Vector& v, double q) {
  if (v.size() == 0) return 0.0;
  if (std::isinf(q)) return v.cwiseAbs().maxCoeff();
  if (q == 1.0) return v.cwiseAbs().sum();
  if (q == 2.0) return v.norm();
  return std::pow(v.cwiseAbs().array().pow(q).sum(), 1.0 / q);
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Linear-interpolation quantile of an ascending-sorted sample, q in [0,1].
inline double quantile_sorted(const std::vector<double>& xs, double q) {
  require(!xs.empty(), "quantile_sorted: empty sample");
  if (xs.size() == 1) return xs.front();
  const double pos = q * (xs.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= xs.size()) return xs.back();
  const double frac = pos - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

}  // namespace sparsediff
