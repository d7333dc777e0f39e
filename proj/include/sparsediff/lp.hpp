#pragma once

#include <cassert>
#include <vector>

#include "sparsediff/common.hpp"

namespace sparsediff {

/// Dense two-phase primal simplex for  min c'x  s.t.  G x <= h,  x >= 0.
/// Bland's rule (lowest eligible index enters; ratio ties resolved by lowest
/// basic index) gives termination and a deterministic optimum.
struct SimplexResult {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  Vector x;              // structural variables
  double objective = 0.0;
  Vector reduced_costs;  // over structural + slack columns, >= 0 at optimum
  Vector slack;          // slack values per row
  int pivots = 0;
};

inline SimplexResult simplex_min(const Vector& cost, const Matrix& g, const Vector& h) {
  const int m = static_cast<int>(g.rows());
  const int nv = static_cast<int>(g.cols());
  require(cost.size() == nv && h.size() == m, "simplex_min: dimension mismatch");
  require(g.allFinite() && h.allFinite() && cost.allFinite(), "simplex_min: non-finite input");
  constexpr double tol = 1e-9;

  // Columns: [structural | slacks | artificials], one slack per row, one
  // artificial per negative-rhs row.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (h[i] < 0.0) art_rows.push_back(i);
  const int n_art = static_cast<int>(art_rows.size());
  const int n_real = nv + m;
  const int n_cols = n_real + n_art;

  Matrix t = Matrix::Zero(m, n_cols + 1);
  std::vector<int> basis(m);
  t.block(0, 0, m, nv) = g;
  for (int i = 0; i < m; ++i) {
    t(i, nv + i) = 1.0;
    t(i, n_cols) = h[i];
    basis[i] = nv + i;
  }
  for (int a = 0; a < n_art; ++a) {
    const int i = art_rows[a];
    t.row(i) = -t.row(i);  // make rhs nonnegative
    t(i, n_real + a) = 1.0;
    basis[i] = n_real + a;
  }

  SimplexResult res;

  // One simplex phase on objective row `obj`; columns >= col_limit excluded.
  auto run = [&](Eigen::RowVectorXd& obj, int col_limit) -> bool {
    for (;;) {
      int enter = -1;
      for (int j = 0; j < col_limit; ++j) {
        if (obj[j] < -tol) {
          enter = j;
          break;  // Bland: lowest index
        }
      }
      if (enter < 0) return true;  // optimal
      int leave = -1;
      double best_ratio = 0.0;
      for (int i = 0; i < m; ++i) {
        if (t(i, enter) > tol) {
          const double ratio = t(i, n_cols) / t(i, enter);
          if (leave < 0 || ratio < best_ratio - tol ||
              (ratio < best_ratio + tol && basis[i] < basis[leave])) {
            leave = i;
            best_ratio = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded direction
      // Pivot (leave, enter).
      t.row(leave) /= t(leave, enter);
      for (int i = 0; i < m; ++i)
        if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
      obj -= obj[enter] * t.row(leave);
      basis[leave] = enter;
      ++res.pivots;
    }
  };

  if (n_art > 0) {
    // Phase 1: minimize the sum of artificials.
    Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(n_cols + 1);
    for (int a = 0; a < n_art; ++a) obj[n_real + a] = 1.0;
    for (int i = 0; i < m; ++i)
      if (basis[i] >= n_real) obj -= t.row(i);
    const bool ok = run(obj, n_cols);
    assert(ok);  // phase-1 objective is bounded below by 0
    (void)ok;
    if (-obj[n_cols] > 1e-7) {
      res.status = SimplexResult::Status::infeasible;
      return res;
    }
    // Drive remaining basic artificials out where possible; rows that cannot
    // pivot are redundant and stay at zero.
    for (int i = 0; i < m; ++i) {
      if (basis[i] >= n_real) {
        for (int j = 0; j < n_real; ++j) {
          if (std::abs(t(i, j)) > tol) {
            t.row(i) /= t(i, j);
            for (int r = 0; r < m; ++r)
              if (r != i && t(r, j) != 0.0) t.row(r) -= t(r, j) * t.row(i);
            basis[i] = j;
            ++res.pivots;
            break;
          }
        }
      }
    }
  }

  // Phase 2 on the real objective, artificials excluded from entering.
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(n_cols + 1);
  obj.head(nv) = cost.transpose();
  for (int i = 0; i < m; ++i)
    if (basis[i] < nv && cost[basis[i]] != 0.0) obj -= cost[basis[i]] * t.row(i);
  if (!run(obj, n_real)) {
    res.status = SimplexResult::Status::unbounded;
    return res;
  }

  res.status = SimplexResult::Status::optimal;
  res.x = Vector::Zero(nv);
  res.slack = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < nv)
      res.x[basis[i]] = t(i, n_cols);
    else if (basis[i] < n_real)
      res.slack[basis[i] - nv] = t(i, n_cols);
  }
  res.objective = -obj[n_cols];
  res.reduced_costs = obj.head(n_real).transpose();
  return res;
}

/// Minimize ||theta||_1 subject to |c_i + (A theta)_i| <= r_i for all i,
/// via the split theta = u - v with u, v >= 0.  The LP core every Dantzig
/// selector computation here reduces to.
struct LpResult {
  Vector theta;
  bool feasible = false;
  double objective = 0.0;
  int pivots = 0;
};

inline LpResult lp_min_l1(const Matrix& a, const Vector& c, const Vector& r) {
  const int m = static_cast<int>(a.rows());
  const int p = static_cast<int>(a.cols());
  require(c.size() == m && r.size() == m, "lp_min_l1: dimension mismatch");
  require((r.array() >= 0.0).all(), "lp_min_l1: radii must be nonnegative");

  Matrix g(2 * m, 2 * p);
  g.topLeftCorner(m, p) = a;
  g.topRightCorner(m, p) = -a;
  g.bottomLeftCorner(m, p) = -a;
  g.bottomRightCorner(m, p) = a;
  Vector h(2 * m);
  h.head(m) = r - c;
  h.tail(m) = r + c;

  const SimplexResult s = simplex_min(Vector::Ones(2 * p), g, h);
  LpResult out;
  out.pivots = s.pivots;
  if (s.status != SimplexResult::Status::optimal) return out;  // infeasible
  out.feasible = true;
  out.theta = s.x.head(p) - s.x.tail(p);
  out.objective = s.objective;
  return out;
}

}  // namespace sparsediff
