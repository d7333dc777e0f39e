#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/rng.hpp"
#include "sparsediff/simulate.hpp"

namespace sparsediff {

// Cone-restricted factors of a PSD matrix J for a support set T0, over the
// cone C_{T0} = { h : ||h_{T0^c}||_1 <= ||h_{T0}||_1 }.  All objectives are
// evaluated in slice-normalized form (scale h so that ||h_{T0}||_1 = 1),
// which makes every factor 0-homogeneous in h:
//
//   kappa(h) = sqrt(S * h'Jh) / ||h_{T0}||_1
//   RE(h)    = sqrt(h'Jh) / ||h||_2
//   F_q(h)   = S^{1/q} sqrt(h'Jh) / ||h||_q      (q in [1, inf], S^{1/inf}=1)
//
// The infima are nonconvex over the cone; for small p we enumerate sign
// patterns on T0 (each slice subproblem is convex for kappa) and run
// projected descent; for larger p the best of many random cone directions is
// reported.  That value only upper-bounds the true infimum, which the method
// label records.

enum class FactorMethod { exact_enumeration, projected_descent, random_lower_bound };

inline std::string to_string(FactorMethod m) {
  switch (m) {
    case FactorMethod::exact_enumeration: return "exact_enumeration";
    case FactorMethod::projected_descent: return "projected_descent";
    case FactorMethod::random_lower_bound: return "random_lower_bound";
  }
  return "?";
}

struct FactorOptions {
  int max_iters = 2000;
  int restarts = 8;
  double step_tol = 1e-10;
  int exact_p_limit = 12;       // sign-pattern enumeration up to this p
  int random_directions = 100000;
  std::uint64_t seed = 0x5eed;  // direction stream for the random mode
  bool polish = true;           // descent polish of the best random direction
};

struct FactorReport {
  std::vector<int> support;
  double kappa = 0.0;
  double re = 0.0;
  std::vector<double> q_values;  // kInf encodes q = infinity
  std::vector<double> f_values;
  Vector kappa_cert, re_cert;
  std::vector<Vector> f_certs;
  FactorMethod method = FactorMethod::exact_enumeration;

  double f(double q) const {
    for (std::size_t i = 0; i < q_values.size(); ++i) {
      if (q_values[i] == q || (std::isinf(q) && std::isinf(q_values[i]))) return f_values[i];
    }
    throw std::invalid_argument("FactorReport: q was not computed");
  }
};

namespace cone {

inline bool in_cone(const Vector& h, const std::vector<int>& t0, double tol = 1e-12) {
  double on = 0.0;
  for (int i : t0) on += std::abs(h[i]);
  return h.cwiseAbs().sum() - on <= on + tol;
}

// Euclidean projection onto the probability simplex {x >= 0, sum x = 1}.
inline Vector project_simplex(Vector v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> u(v.data(), v.data() + n);
  std::sort(u.begin(), u.end(), std::greater<>());
  double running = 0.0, tau = 0.0;
  int rho = 0;
  for (int j = 0; j < n; ++j) {
    running += u[j];
    const double t = (running - 1.0) / (j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      tau = t;
    }
  }
  (void)rho;
  return v.array().unaryExpr([tau](double x) { return std::max(x - tau, 0.0); });
}

// Euclidean projection onto the l1 ball of radius r.
inline Vector project_l1_ball(const Vector& v, double r) {
  if (v.cwiseAbs().sum() <= r || r <= 0.0) {
    if (r <= 0.0) return Vector::Zero(v.size());
    return v;
  }
  Vector mag = project_simplex(v.cwiseAbs() / r) * r;
  // re-derive soft threshold from the scaled simplex solution
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = (v[i] >= 0.0 ? mag[i] : -mag[i]);
  return out;
}

}  // namespace cone

namespace detail_factors {

struct Slice {
  std::vector<int> t0;
  std::vector<int> off;
  std::vector<int> sign;  // sign pattern on t0 coordinates

  // Project onto {sign_i * h_i >= 0 on T0, sum sign_i h_i = 1, ||h_off||_1 <= 1}.
  Vector project(const Vector& h) const {
    Vector out = h;
    Vector u(t0.size());
    for (std::size_t i = 0; i < t0.size(); ++i) u[i] = sign[i] * h[t0[i]];
    u = cone::project_simplex(u);
    for (std::size_t i = 0; i < t0.size(); ++i) out[t0[i]] = sign[i] * u[i];
    if (!off.empty()) {
      Vector v(off.size());
      for (std::size_t i = 0; i < off.size(); ++i) v[i] = h[off[i]];
      v = cone::project_l1_ball(v, 1.0);
      for (std::size_t i = 0; i < off.size(); ++i) out[off[i]] = v[i];
    }
    return out;
  }
};

// Objective codes: q > 0 means F_q (kInf for F_inf), q == 0 means the
// quadratic h'Jh used by kappa (same minimizer on a slice), q == -2 means RE.
struct Objective {
  const Matrix* j;
  double s;  // |T0|
  double q;

  double value(const Vector& h) const {
    const double quad = h.dot(*j * h);
    if (q == 0.0) return quad;
    const double num = std::sqrt(std::max(quad, 0.0));
    if (q == -2.0) return num / h.norm();
    const double sq = std::isinf(q) ? 1.0 : std::pow(s, 1.0 / q);
    const double denom = lq_norm(h, q);
    return denom > 0.0 ? sq * num / denom : kInf;
  }

  Vector gradient(const Vector& h) const {
    Vector jh = *j * h;
    const double quad = h.dot(jh);
    if (q == 0.0) return 2.0 * jh;
    const double val = value(h);
    if (quad <= 0.0) return Vector::Zero(h.size());  // at a global minimum
    Vector norm_grad(h.size());
    double denom;
    if (q == -2.0) {
      denom = h.norm();
      norm_grad = h / denom;
    } else if (std::isinf(q)) {
      int arg = 0;
      h.cwiseAbs().maxCoeff(&arg);
      denom = std::abs(h[arg]);
      norm_grad.setZero();
      norm_grad[arg] = h[arg] >= 0.0 ? 1.0 : -1.0;
    } else {
      denom = lq_norm(h, q);
      for (int i = 0; i < h.size(); ++i) {
        const double a = std::abs(h[i]);
        norm_grad[i] = a == 0.0 ? 0.0
                                : (h[i] >= 0.0 ? 1.0 : -1.0) *
                                      std::pow(a / denom, q - 1.0);
      }
    }
    return val * (jh / quad - norm_grad / denom);
  }
};

// Projected gradient descent with backtracking on a slice.
inline std::pair<double, Vector> descend(const Objective& f, const Slice& slice,
                                         Vector h, const FactorOptions& opts) {
  h = slice.project(h);
  double fval = f.value(h);
  double step = 1.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (fval == 0.0) break;
    const Vector grad = f.gradient(h);
    bool moved = false;
    while (step >= 1e-18) {
      Vector cand = slice.project(h - step * grad);
      const double cval = f.value(cand);
      if (cval < fval) {
        const double delta = (cand - h).cwiseAbs().maxCoeff();
        h = std::move(cand);
        fval = cval;
        step = std::min(step * 1.5, 1e6);
        moved = delta >= opts.step_tol;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return {fval, h};
}

inline std::vector<Vector> start_points(const Slice& slice, int p, int restarts,
                                        rng::Stream rs) {
  std::vector<Vector> starts;
  // Equal-magnitude support vector, then single-coordinate spikes.
  Vector eq = Vector::Zero(p);
  for (std::size_t i = 0; i < slice.t0.size(); ++i)
    eq[slice.t0[i]] = slice.sign[i] / static_cast<double>(slice.t0.size());
  starts.push_back(eq);
  for (std::size_t i = 0; i < slice.t0.size(); ++i) {
    Vector spike = Vector::Zero(p);
    spike[slice.t0[i]] = slice.sign[i];
    starts.push_back(spike);
  }
  std::uint64_t ctr = 0;
  while (static_cast<int>(starts.size()) < restarts + 1 + static_cast<int>(slice.t0.size())) {
    Vector h(p);
    for (int i = 0; i < p; ++i) h[i] = rs.normal(ctr++);
    starts.push_back(slice.project(h));
  }
  return starts;
}

}  // namespace detail_factors

namespace detail_factors {

// Shared driver: minimizes the requested objectives over the cone and fills
// values + certificates.  `objective_q` uses the coding of Objective::q.
inline void solve_factors(const Matrix& j, const std::vector<int>& t0,
                          const std::vector<double>& objective_q,
                          std::vector<double>& values, std::vector<Vector>& certs,
                          FactorMethod& method, const FactorOptions& opts) {
  const int p = static_cast<int>(j.rows());
  const int s = static_cast<int>(t0.size());
  require(s > 0, "factors: support set must be nonempty");
  require(j.cols() == p, "factors: matrix must be square");
  require(entrywise_sup_norm(j - j.transpose()) <= 1e-10 * (1.0 + entrywise_sup_norm(j)),
          "factors: matrix must be symmetric");
  for (int i : t0) require(i >= 0 && i < p, "factors: support index out of range");

  std::vector<int> off;
  for (int i = 0; i < p; ++i)
    if (std::find(t0.begin(), t0.end(), i) == t0.end()) off.push_back(i);

  const std::size_t k = objective_q.size();
  values.assign(k, kInf);
  certs.assign(k, Vector::Zero(p));

  std::vector<Objective> objs;
  for (double q : objective_q) objs.push_back({&j, static_cast<double>(s), q});

  rng::Stream rs = rng::stream(opts.seed, rng::kDomainFactors);

  auto consider = [&](std::size_t fi, double val, const Vector& h) {
    if (val < values[fi]) {
      values[fi] = val;
      certs[fi] = h;
    }
  };

  if (p <= opts.exact_p_limit) {
    method = FactorMethod::exact_enumeration;
    // Enumerate sign patterns on T0; h <-> -h halves the enumeration.
    const std::uint64_t patterns = 1ull << (s - 1);
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      Slice slice{t0, off, {}};
      slice.sign.resize(s);
      slice.sign[0] = 1;
      for (int b = 1; b < s; ++b) slice.sign[b] = (mask >> (b - 1)) & 1 ? -1 : 1;
      const auto starts = start_points(slice, p, opts.restarts, rs.derive(mask));
      for (std::size_t fi = 0; fi < k; ++fi) {
        for (const Vector& h0 : starts) {
          auto [val, h] = descend(objs[fi], slice, h0, opts);
          consider(fi, val, h);
        }
      }
    }
  } else {
    method = FactorMethod::random_lower_bound;
    // Best of random cone directions; an upper bound on each infimum.
    Vector h(p);
    std::uint64_t ctr = 0;
    for (int d = 0; d < opts.random_directions; ++d) {
      double on = 0.0;
      for (int i : t0) {
        h[i] = rs.normal(ctr++);
        on += std::abs(h[i]);
      }
      if (on == 0.0) continue;
      for (int i : t0) h[i] /= on;
      double offsum = 0.0;
      for (int i : off) {
        h[i] = rs.normal(ctr++);
        offsum += std::abs(h[i]);
      }
      const double scale = offsum > 0.0 ? rs.uniform(ctr++) / offsum : 0.0;
      for (int i : off) h[i] *= scale;
      for (std::size_t fi = 0; fi < k; ++fi) consider(fi, objs[fi].value(h), h);
    }
    // Canonical candidates: support spikes.
    for (int i : t0) {
      Vector spike = Vector::Zero(p);
      spike[i] = 1.0;
      for (std::size_t fi = 0; fi < k; ++fi) consider(fi, objs[fi].value(spike), spike);
    }
    if (opts.polish) {
      for (std::size_t fi = 0; fi < k; ++fi) {
        Slice slice{t0, off, {}};
        slice.sign.resize(s);
        for (int b = 0; b < s; ++b) slice.sign[b] = certs[fi][t0[b]] >= 0.0 ? 1 : -1;
        auto [val, h] = descend(objs[fi], slice, certs[fi], opts);
        consider(fi, val, h);
      }
    }
  }
}

}  // namespace detail_factors

/// Full report: compatibility factor, restricted eigenvalue, and the weak
/// cone invertibility factors for the requested q values (kInf for q = inf).
inline FactorReport factor_report(const Matrix& j, const std::vector<int>& t0,
                                  std::vector<double> qs = {2.0, kInf},
                                  const FactorOptions& opts = {}) {
  const int s = static_cast<int>(t0.size());
  std::vector<double> codes{0.0, -2.0};  // kappa (quadratic), RE
  for (double q : qs) {
    require(std::isinf(q) || q >= 1.0, "factor_report: q must lie in [1, inf]");
    codes.push_back(q);
  }

  std::vector<double> values;
  std::vector<Vector> certs;
  FactorReport rep;
  detail_factors::solve_factors(j, t0, codes, values, certs, rep.method, opts);

  rep.support = t0;
  rep.kappa = std::sqrt(std::max(values[0], 0.0) * s);  // slice makes ||h_{T0}||_1 = 1
  rep.kappa_cert = certs[0];
  rep.re = values[1];
  rep.re_cert = certs[1];
  rep.q_values = qs;
  rep.f_values.assign(values.begin() + 2, values.end());
  rep.f_certs.assign(certs.begin() + 2, certs.end());
  return rep;
}

inline double compatibility(const Matrix& j, const std::vector<int>& t0,
                            const FactorOptions& opts = {}) {
  return factor_report(j, t0, {}, opts).kappa;
}

inline double restricted_eigenvalue(const Matrix& j, const std::vector<int>& t0,
                                    const FactorOptions& opts = {}) {
  return factor_report(j, t0, {}, opts).re;
}

inline double cone_invertibility(const Matrix& j, const std::vector<int>& t0, double q,
                                 const FactorOptions& opts = {}) {
  return factor_report(j, t0, {q}, opts).f(q);
}

/// Evaluate a factor objective at a given direction (certificate checking).
/// q = 0 evaluates kappa, q = -2 evaluates RE, otherwise F_q.
inline double factor_objective(const Matrix& j, const std::vector<int>& t0, double q,
                               const Vector& h) {
  detail_factors::Objective obj{&j, static_cast<double>(t0.size()), q};
  if (q == 0.0) {
    double on = 0.0;
    for (int i : t0) on += std::abs(h[i]);
    require(on > 0.0, "factor_objective: certificate has zero support mass");
    return std::sqrt(std::max(h.dot(j * h), 0.0) * static_cast<double>(t0.size())) / on;
  }
  return obj.value(h);
}

/// Empirical check of the compatibility-factor condition across replicates:
/// quantiles of kappa(T0; J_n) and the fraction exceeding delta.
struct AssumptionSummary {
  std::vector<double> kappas;  // ascending
  double min = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, max = 0.0;
  double delta = 0.0;
  double fraction_above = 0.0;
};

inline AssumptionSummary assumption_check(const std::vector<ObservedPath>& paths,
                                          const std::vector<int>& t0, double delta,
                                          const FactorOptions& opts = {}) {
  require(paths.size() >= 20, "assumption_check: need at least 20 replicate paths");
  AssumptionSummary sum;
  sum.delta = delta;
  for (const auto& path : paths)
    sum.kappas.push_back(factor_report(j_matrix(path), t0, {}, opts).kappa);
  std::sort(sum.kappas.begin(), sum.kappas.end());
  sum.min = sum.kappas.front();
  sum.q25 = quantile_sorted(sum.kappas, 0.25);
  sum.median = quantile_sorted(sum.kappas, 0.5);
  sum.q75 = quantile_sorted(sum.kappas, 0.75);
  sum.max = sum.kappas.back();
  int above = 0;
  for (double k : sum.kappas)
    if (k > delta) ++above;
  sum.fraction_above = static_cast<double>(above) / sum.kappas.size();
  return sum;
}

}  // namespace sparsediff
