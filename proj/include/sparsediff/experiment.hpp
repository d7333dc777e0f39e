#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sparsediff/common.hpp"
#include "sparsediff/model.hpp"
#include "sparsediff/quasi_lik.hpp"
#include "sparsediff/rng.hpp"
#include "sparsediff/selector.hpp"

namespace sparsediff {

/// Either a fixed ambient dimension or the growth schedule p = ceil(exp(c n^zeta)).
struct PRule {
  bool exponential = false;
  int fixed_p = 20;
  double c = 0.0;
  double zeta = 0.0;

  int p_for(int n) const {
    if (!exponential) return fixed_p;
    const double v = std::exp(c * std::pow(static_cast<double>(n), zeta));
    require(v < 1e7, "PRule: exponential schedule produced an unreasonable p");
    return std::max(1, static_cast<int>(std::ceil(v)));
  }
};

/// theta0 generator: an explicit vector on the leading support, or
/// random-signs magnitude m on a random support (drawn once per p from the
/// master seed, so every replicate of a config shares the same truth).
struct Theta0Gen {
  bool random_signs = false;
  std::vector<double> values;  // fixed mode: S entries, placed on coords 0..S-1
  double magnitude = 1.0;
};

struct ExperimentConfig {
  std::vector<int> n_grid;
  PRule p_rule;
  int sparsity = 2;
  Theta0Gen theta0_gen;
  TuningRule tuning;
  int replicates = 1;
  Drift drift;
  CovariateMode covariates = CovariateMode::ou_tanh;
  double cov_bound = 1.0;
  double x0 = 0.0;
  int substeps = 50;
  std::uint64_t master_seed = 0;
  std::string out_dir;
  int threads = 0;  // 0 = hardware concurrency

  void validate() const {
    tuning.validate();
    require(replicates >= 1, "ExperimentConfig: replicates must be >= 1");
    require(!n_grid.empty(), "ExperimentConfig: n_grid must be nonempty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      require(n_grid[i] >= 1, "ExperimentConfig: n values must be positive");
      require(i == 0 || n_grid[i] > n_grid[i - 1],
              "ExperimentConfig: n_grid must be strictly increasing");
    }
    require(sparsity >= 1, "ExperimentConfig: sparsity must be >= 1");
    for (int n : n_grid)
      require(sparsity <= p_rule.p_for(n), "ExperimentConfig: sparsity exceeds p");
    if (!theta0_gen.random_signs)
      require(static_cast<int>(theta0_gen.values.size()) == sparsity,
              "ExperimentConfig: fixed theta0 must list exactly S values");
    else
      require(theta0_gen.magnitude > 0.0, "ExperimentConfig: magnitude must be positive");
    require(cov_bound > 0.0, "ExperimentConfig: cov_bound must be positive");
    require(substeps >= 1, "ExperimentConfig: substeps must be >= 1");
  }

  Vector theta0_for(int p) const {
    Vector theta = Vector::Zero(p);
    if (!theta0_gen.random_signs) {
      for (int i = 0; i < sparsity; ++i) theta[i] = theta0_gen.values[i];
      return theta;
    }
    rng::Stream s = rng::stream(master_seed, rng::kDomainTheta, static_cast<std::uint64_t>(p));
    // Partial Fisher-Yates: first S slots of a permutation of 0..p-1.
    std::vector<int> idx(p);
    for (int i = 0; i < p; ++i) idx[i] = i;
    for (int i = 0; i < sparsity; ++i) {
      const int j = i + static_cast<int>(s.bits(i) % static_cast<std::uint64_t>(p - i));
      std::swap(idx[i], idx[j]);
    }
    for (int i = 0; i < sparsity; ++i) {
      const bool neg = (s.bits(1000 + i) & 1) != 0;
      theta[idx[i]] = neg ? -theta0_gen.magnitude : theta0_gen.magnitude;
    }
    return theta;
  }

  ModelSpec model_for(int n) const {
    ModelSpec ms;
    ms.p = p_rule.p_for(n);
    ms.n = n;
    ms.substeps = substeps;
    ms.theta0 = theta0_for(ms.p);
    ms.drift = drift;
    ms.covariates = covariates;
    ms.cov_bound = cov_bound;
    ms.x0 = x0;
    return ms;
  }
};

/// One Monte Carlo replicate; mirrors the records.csv schema exactly.
/// bound_a_slack / bound_c_slack are NaN when the bound's premises did not
/// hold on that replicate (theta0 infeasible at gamma, estimator infeasible
/// or above ||theta0||_1, or a nonpositive denominator).
struct ReplicateRecord {
  int n = 0;
  int p = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  double gamma = 0.0;
  bool feas_gamma = false;   // ||psi_n(0;theta0)||_inf <= gamma
  bool feas_6gamma = false;  // ... <= 6 gamma
  double eps = kNaN;
  double kappa = kNaN;
  double re = kNaN;
  double f2 = kNaN;
  double finf = kNaN;
  double err_l1 = kNaN;
  double err_l2 = kNaN;
  double err_linf = kNaN;
  double bound_a_slack = kNaN;
  double bound_c_slack = kNaN;
  SolverStatus solver_status = SolverStatus::error;
  double runtime_ms = 0.0;
};

/// Config-level constants the theorem bounds need; stored as CSV comments.
struct BoundMeta {
  bool present = false;
  double theta0_l1 = 0.0;
  double cov_bound = 0.0;
  int sparsity = 0;

  double nu() const { return nu_factor(2.0 * cov_bound * theta0_l1); }
  double k2() const { return 8.0 * theta0_l1 / nu(); }
  double k3() const { return 4.0 * theta0_l1 * theta0_l1; }
  double k4() const { return 4.0 / nu(); }
};

struct SummaryRow {
  int n = 0, p = 0, replicates = 0;
  double gamma = 0.0;
  double feas_gamma_freq = 0.0, feas_6gamma_freq = 0.0;
  // med/q25/q75 per tracked statistic
  double eps_med = kNaN, eps_q25 = kNaN, eps_q75 = kNaN;
  double kappa_med = kNaN, kappa_q25 = kNaN, kappa_q75 = kNaN;
  double re_med = kNaN, re_q25 = kNaN, re_q75 = kNaN;
  double f2_med = kNaN, f2_q25 = kNaN, f2_q75 = kNaN;
  double finf_med = kNaN, finf_q25 = kNaN, finf_q75 = kNaN;
  double err_l1_med = kNaN, err_l1_q25 = kNaN, err_l1_q75 = kNaN;
  double err_l2_med = kNaN, err_l2_q25 = kNaN, err_l2_q75 = kNaN;
  double err_linf_med = kNaN, err_linf_q25 = kNaN, err_linf_q75 = kNaN;
  int bound_a_checked = 0, bound_a_violations = 0;
  int bound_c_checked = 0, bound_c_violations = 0;
};

inline std::vector<SummaryRow> compute_summaries(const std::vector<ReplicateRecord>& records) {
  std::vector<int> ns;
  for (const auto& r : records)
    if (std::find(ns.begin(), ns.end(), r.n) == ns.end()) ns.push_back(r.n);
  std::sort(ns.begin(), ns.end());

  std::vector<SummaryRow> rows;
  for (int n : ns) {
    SummaryRow row;
    row.n = n;
    std::vector<const ReplicateRecord*> group;
    for (const auto& r : records)
      if (r.n == n) group.push_back(&r);
    row.replicates = static_cast<int>(group.size());
    row.p = group.front()->p;
    row.gamma = group.front()->gamma;

    auto fill = [&group](auto getter, double& med, double& q25, double& q75) {
      std::vector<double> xs;
      for (const auto* r : group) {
        const double v = getter(*r);
        if (std::isfinite(v)) xs.push_back(v);
      }
      if (xs.empty()) return;
      std::sort(xs.begin(), xs.end());
      med = quantile_sorted(xs, 0.5);
      q25 = quantile_sorted(xs, 0.25);
      q75 = quantile_sorted(xs, 0.75);
    };
    fill([](const ReplicateRecord& r) { return r.eps; }, row.eps_med, row.eps_q25, row.eps_q75);
    fill([](const ReplicateRecord& r) { return r.kappa; }, row.kappa_med, row.kappa_q25,
         row.kappa_q75);
    fill([](const ReplicateRecord& r) { return r.re; }, row.re_med, row.re_q25, row.re_q75);
    fill([](const ReplicateRecord& r) { return r.f2; }, row.f2_med, row.f2_q25, row.f2_q75);
    fill([](const ReplicateRecord& r) { return r.finf; }, row.finf_med, row.finf_q25,
         row.finf_q75);
    fill([](const ReplicateRecord& r) { return r.err_l1; }, row.err_l1_med, row.err_l1_q25,
         row.err_l1_q75);
    fill([](const ReplicateRecord& r) { return r.err_l2; }, row.err_l2_med, row.err_l2_q25,
         row.err_l2_q75);
    fill([](const ReplicateRecord& r) { return r.err_linf; }, row.err_linf_med,
         row.err_linf_q25, row.err_linf_q75);

    int fg = 0, f6 = 0;
    for (const auto* r : group) {
      fg += r->feas_gamma ? 1 : 0;
      f6 += r->feas_6gamma ? 1 : 0;
      if (std::isfinite(r->bound_a_slack)) {
        ++row.bound_a_checked;
        if (r->bound_a_slack < 0.0) ++row.bound_a_violations;
      }
      if (std::isfinite(r->bound_c_slack)) {
        ++row.bound_c_checked;
        if (r->bound_c_slack < 0.0) ++row.bound_c_violations;
      }
    }
    row.feas_gamma_freq = static_cast<double>(fg) / row.replicates;
    row.feas_6gamma_freq = static_cast<double>(f6) / row.replicates;
    rows.push_back(row);
  }
  return rows;
}

struct BoundStat {
  int checked = 0;
  int violated = 0;
  int not_applicable = 0;
  double median_slack = kNaN;
};

/// Audit of the consistency-theorem error bounds over the replicates where
/// theta0 satisfied the score constraint at level gamma_n.
struct BoundReport {
  int total_records = 0;
  int feasible_records = 0;  // at the gamma level
  bool vacuous = false;      // no feasible replicates
  BoundStat l2_bound;        // (a): err_2^2 <= (K2 g + K3 e)/RE^2
  BoundStat linf_bound;      // (b): err_inf^2 <= (K2 g + K3 e)/F_inf^2
  BoundStat l1_bound;        // (c): err_1 <= 4 K4 S g / (kappa^2 - 4 S e)
  BoundStat lq_bound;        // (d): err_2 <= xi_{n,2}
};

inline BoundReport verify_bounds(const std::vector<ReplicateRecord>& records,
                                 const BoundMeta& meta) {
  BoundReport rep;
  rep.total_records = static_cast<int>(records.size());

  std::vector<double> sa, sb, sc, sd;
  for (const auto& r : records) {
    if (!r.feas_gamma) continue;
    ++rep.feasible_records;

    auto tally = [](BoundStat& st, std::vector<double>& acc, double slack) {
      if (!std::isfinite(slack)) {
        ++st.not_applicable;
        return;
      }
      ++st.checked;
      if (slack < 0.0) ++st.violated;
      acc.push_back(slack);
    };

    tally(rep.l2_bound, sa, r.bound_a_slack);
    tally(rep.l1_bound, sc, r.bound_c_slack);

    // (b) and (d) are recomputed from the record and config constants; they
    // share the solver-side premises with (a)/(c), so a record where both
    // slack columns are absent is not auditable here either.
    const bool premise_ok =
        std::isfinite(r.bound_a_slack) || std::isfinite(r.bound_c_slack);
    double slack_b = kNaN, slack_d = kNaN;
    if (meta.present && premise_ok) {
      const double num = meta.k2() * r.gamma + meta.k3() * r.eps;
      if (r.finf > 0.0) slack_b = num / (r.finf * r.finf) - r.err_linf * r.err_linf;
      const double s = meta.sparsity;
      const double denom_d = r.kappa * r.kappa - 2.0 * s * r.eps;
      if (denom_d > 0.0 && r.f2 > 0.0) {
        const double xi = (2.0 * std::sqrt(s) * r.eps / r.f2) *
                              (2.0 * meta.k4() * s * r.gamma / denom_d) +
                          2.0 * meta.k4() * std::sqrt(s) * r.gamma / r.f2;
        slack_d = xi - r.err_l2;
      }
    }
    tally(rep.linf_bound, sb, slack_b);
    tally(rep.lq_bound, sd, slack_d);
  }

  rep.vacuous = rep.feasible_records == 0;
  auto med = [](std::vector<double>& xs) {
    if (xs.empty()) return kNaN;
    std::sort(xs.begin(), xs.end());
    return quantile_sorted(xs, 0.5);
  };
  rep.l2_bound.median_slack = med(sa);
  rep.linf_bound.median_slack = med(sb);
  rep.l1_bound.median_slack = med(sc);
  rep.lq_bound.median_slack = med(sd);
  return rep;
}

// ---------------------------------------------------------------------------
// Flat key-value config files.  Keys mirror the ExperimentConfig fields;
// lists are comma-separated; '#' starts a comment.

namespace detail_config {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

inline double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    require(pos == s.size(), "config: malformed number for " + key);
    return v;
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("config: malformed number for " + key);
  }
}

inline int to_int(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  require(v == std::floor(v), "config: expected integer for " + key);
  return static_cast<int>(v);
}

}  // namespace detail_config

inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest;
    std::getline(ls, rest);
    const auto start = rest.find_first_not_of(" \t");
    rest = start == std::string::npos ? "" : rest.substr(start);
    const auto end = rest.find_last_not_of(" \t\r");
    rest = end == std::string::npos ? "" : rest.substr(0, end + 1);
    kv[key] = rest;
  }

  using detail_config::split;
  using detail_config::to_double;
  using detail_config::to_int;

  auto has = [&kv](const std::string& k) { return kv.count(k) > 0; };

  require(has("n_grid") || has("n"), "config: n_grid (or n) is required");
  if (has("n_grid"))
    for (const auto& tok : split(kv["n_grid"], ','))
      cfg.n_grid.push_back(to_int(tok, "n_grid"));
  else
    cfg.n_grid.push_back(to_int(kv["n"], "n"));

  if (has("p_rule")) {
    require(kv["p_rule"] == "exp", "config: p_rule must be 'exp' (or set a fixed p)");
    cfg.p_rule.exponential = true;
    require(has("p_c") && has("p_zeta"), "config: exponential p_rule needs p_c and p_zeta");
    cfg.p_rule.c = to_double(kv["p_c"], "p_c");
    cfg.p_rule.zeta = to_double(kv["p_zeta"], "p_zeta");
  } else {
    require(has("p"), "config: p (or p_rule exp) is required");
    cfg.p_rule.fixed_p = to_int(kv["p"], "p");
  }

  if (has("sparsity")) cfg.sparsity = to_int(kv["sparsity"], "sparsity");
  if (has("S")) cfg.sparsity = to_int(kv["S"], "S");

  require(has("theta0"), "config: theta0 is required");
  {
    auto toks = split(kv["theta0"], ' ');
    require(!toks.empty(), "config: theta0 mode missing");
    if (toks[0] == "fixed") {
      require(toks.size() == 2, "config: theta0 fixed needs a value list");
      for (const auto& tok : split(toks[1], ','))
        cfg.theta0_gen.values.push_back(to_double(tok, "theta0"));
    } else if (toks[0] == "random_signs") {
      require(toks.size() == 2, "config: theta0 random_signs needs a magnitude");
      cfg.theta0_gen.random_signs = true;
      cfg.theta0_gen.magnitude = to_double(toks[1], "theta0 magnitude");
    } else {
      throw std::invalid_argument("config: theta0 mode must be fixed|random_signs");
    }
  }

  if (has("K0")) cfg.tuning.k0 = to_double(kv["K0"], "K0");
  if (has("alpha")) cfg.tuning.alpha = to_double(kv["alpha"], "alpha");
  if (has("zeta")) cfg.tuning.zeta = to_double(kv["zeta"], "zeta");
  if (has("replicates")) cfg.replicates = to_int(kv["replicates"], "replicates");

  if (has("drift")) {
    auto toks = split(kv["drift"], ' ');
    if (toks[0] == "zero")
      cfg.drift = Drift::zero();
    else if (toks[0] == "linear") {
      require(toks.size() == 2, "config: drift linear needs a rate");
      cfg.drift = Drift::linear(to_double(toks[1], "drift rate"));
    } else if (toks[0] == "tanh") {
      require(toks.size() == 2, "config: drift tanh needs a scale");
      cfg.drift = Drift::tanh_bounded(to_double(toks[1], "drift scale"));
    } else {
      throw std::invalid_argument("config: drift must be zero|linear <l>|tanh <a>");
    }
  }

  if (has("covariates")) {
    if (kv["covariates"] == "ou")
      cfg.covariates = CovariateMode::ou_tanh;
    else if (kv["covariates"] == "constant")
      cfg.covariates = CovariateMode::constant;
    else
      throw std::invalid_argument("config: covariates must be ou|constant");
  }
  if (has("cov_bound")) cfg.cov_bound = to_double(kv["cov_bound"], "cov_bound");
  if (has("x0")) cfg.x0 = to_double(kv["x0"], "x0");
  if (has("substeps")) cfg.substeps = to_int(kv["substeps"], "substeps");
  if (has("master_seed"))
    cfg.master_seed = std::stoull(kv["master_seed"]);
  if (has("out_dir")) cfg.out_dir = kv["out_dir"];
  if (has("threads")) cfg.threads = to_int(kv["threads"], "threads");

  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  std::istringstream ss(text);
  return parse_experiment_config(ss);
}

}  // namespace sparsediff
