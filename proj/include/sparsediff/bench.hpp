#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <thread>
#include <vector>

#include "sparsediff/csv.hpp"
#include "sparsediff/experiment.hpp"
#include "sparsediff/factors.hpp"
#include "sparsediff/selector.hpp"
#include "sparsediff/svg.hpp"

namespace sparsediff {

struct ExperimentResult {
  std::vector<ReplicateRecord> records;  // sorted by (n, replicate)
  std::vector<SummaryRow> summary;
  BoundMeta meta;
};

namespace detail_bench {

inline ReplicateRecord run_replicate(const ExperimentConfig& cfg, int n_index, int rep) {
  const auto t_start = std::chrono::steady_clock::now();
  const int n = cfg.n_grid[n_index];

  ReplicateRecord rec;
  rec.n = n;
  rec.replicate = rep;
  rec.seed = rng::fold(rng::fold(rng::fold(cfg.master_seed, rng::kDomainReplicate),
                                 static_cast<std::uint64_t>(n_index)),
                       static_cast<std::uint64_t>(rep));
  try {
    const ModelSpec ms = cfg.model_for(n);
    rec.p = ms.p;
    rec.gamma = gamma_n(cfg.tuning, n);

    const ObservedPath path = simulate(ms, rec.seed);

    const double psi0_sup = lq_norm(score(path, ms.theta0, Drift::zero()), kInf);
    rec.feas_gamma = psi0_sup <= rec.gamma;
    rec.feas_6gamma = psi0_sup <= 6.0 * rec.gamma;
    rec.eps = epsilon_n(path, ms.theta0);

    const FactorReport factors = factor_report(j_matrix(path), ms.support());
    rec.kappa = factors.kappa;
    rec.re = factors.re;
    rec.f2 = factors.f(2.0);
    rec.finf = factors.f(kInf);

    const EstimateResult est = estimate(path, rec.gamma);
    rec.solver_status = est.solver_status;
    const Vector err = est.theta_hat - ms.theta0;
    rec.err_l1 = lq_norm(err, 1.0);
    rec.err_l2 = lq_norm(err, 2.0);
    rec.err_linf = lq_norm(err, kInf);

    // Theorem bound slacks.  The proof chain needs theta0 feasible at gamma,
    // a feasible estimate, and ||theta_hat||_1 <= ||theta0||_1; outside that
    // event the slack is not applicable and stays NaN.
    const double theta0_l1 = ms.theta0.cwiseAbs().sum();
    const bool premises = rec.feas_gamma && est.feasible &&
                          est.objective <= theta0_l1 * (1.0 + 1e-9);
    if (premises) {
      const double nu = nu_factor(2.0 * ms.cov_bound * theta0_l1);
      const double k2 = 8.0 * theta0_l1 / nu;
      const double k3 = 4.0 * theta0_l1 * theta0_l1;
      const double k4 = 4.0 / nu;
      if (rec.re > 0.0)
        rec.bound_a_slack =
            (k2 * rec.gamma + k3 * rec.eps) / (rec.re * rec.re) - rec.err_l2 * rec.err_l2;
      const double s = ms.sparsity();
      const double denom = rec.kappa * rec.kappa - 4.0 * s * rec.eps;
      if (denom > 0.0)
        rec.bound_c_slack = 4.0 * k4 * s * rec.gamma / denom - rec.err_l1;
    }
  } catch (const std::exception&) {
    rec.solver_status = SolverStatus::error;
  }

  rec.runtime_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t_start)
          .count();
  return rec;
}

}  // namespace detail_bench

/// Run the full Monte Carlo grid.  Replicates execute on a work pool with
/// derived per-replicate seeds; records come back sorted by (n, replicate),
/// so outputs are byte-stable apart from the runtime column.  When out_dir
/// is set, writes records.csv, summary.csv and the error-decay SVGs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  struct Task {
    int n_index;
    int rep;
  };
  std::vector<Task> tasks;
  for (int ni = 0; ni < static_cast<int>(cfg.n_grid.size()); ++ni)
    for (int r = 0; r < cfg.replicates; ++r) tasks.push_back({ni, r});

  ExperimentResult out;
  out.records.resize(tasks.size());

  const unsigned hw = std::thread::hardware_concurrency();
  const int n_threads =
      cfg.threads > 0 ? cfg.threads : static_cast<int>(hw > 0 ? hw : 1);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      out.records[i] = detail_bench::run_replicate(cfg, tasks[i].n_index, tasks[i].rep);
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  out.summary = compute_summaries(out.records);
  out.meta.present = true;
  out.meta.theta0_l1 = cfg.theta0_for(cfg.p_rule.p_for(cfg.n_grid.front())).cwiseAbs().sum();
  out.meta.cov_bound = cfg.cov_bound;
  out.meta.sparsity = cfg.sparsity;

  if (!cfg.out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error("run_experiment: cannot create " + cfg.out_dir);
    write_records_csv(cfg.out_dir + "/records.csv", out.records, out.meta);
    write_summary_csv(cfg.out_dir + "/summary.csv", out.summary);
    write_error_plots(cfg.out_dir, out.summary);
  }
  return out;
}

}  // namespace sparsediff
