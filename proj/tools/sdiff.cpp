// sdiff: command-line front end for the sparse diffusion toolkit.
//
// Subcommands: simulate, score, estimate, factors, experiment, verify, plot.
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sparsediff/sparsediff.hpp"

namespace sd = sparsediff;

namespace {

sd::ExperimentConfig load_config(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw sd::io_error("cannot open config file " + file);
  return sd::parse_experiment_config(in);
}

std::vector<double> parse_number_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stod(tok));
  }
  return out;
}

std::vector<int> parse_index_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_number_list(s)) out.push_back(static_cast<int>(v));
  return out;
}

void print_vector(const std::string& name, const sd::Vector& v) {
  std::printf("%s =", name.c_str());
  for (int i = 0; i < v.size(); ++i) std::printf(" %.10g", v[i]);
  std::printf("\n");
}

void print_sparse(const std::string& name, const sd::Vector& v) {
  std::printf("%s (nonzeros):", name.c_str());
  bool any = false;
  for (int i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) {
      std::printf(" [%d]=%.10g", i, v[i]);
      any = true;
    }
  }
  std::printf("%s\n", any ? "" : " none");
}

sd::Matrix read_matrix_file(const std::string& file) {
  std::ifstream in(file);
  if (!in) throw sd::io_error("cannot open matrix file " + file);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!row.empty()) rows.push_back(row);
  }
  if (rows.empty()) throw sd::format_error("matrix file is empty");
  sd::Matrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw sd::format_error("matrix file has ragged rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

void print_factor_report(const sd::FactorReport& rep) {
  std::printf("method      %s\n", sd::to_string(rep.method).c_str());
  std::printf("kappa       %.10g\n", rep.kappa);
  std::printf("re          %.10g\n", rep.re);
  for (std::size_t i = 0; i < rep.q_values.size(); ++i) {
    if (std::isinf(rep.q_values[i]))
      std::printf("f_inf       %.10g\n", rep.f_values[i]);
    else
      std::printf("f_%-9.4g %.10g\n", rep.q_values[i], rep.f_values[i]);
  }
}

int cmd_simulate(const std::string& config, std::uint64_t seed, bool seed_set,
                 const std::string& out) {
  sd::ExperimentConfig cfg = load_config(config);
  if (seed_set) cfg.master_seed = seed;
  sd::ModelSpec ms = cfg.model_for(cfg.n_grid.front());
  const sd::ObservedPath path = sd::simulate(ms, cfg.master_seed);
  sd::save_path(path, out, ms.substeps, ms.digest());
  std::printf("wrote %s  (n=%d p=%d seed=%llu digest=%llx)\n", out.c_str(), path.n,
              path.p(), static_cast<unsigned long long>(cfg.master_seed),
              static_cast<unsigned long long>(ms.digest()));
  return 0;
}

int cmd_score(const std::string& path_file, const std::string& theta_str,
              const std::string& config) {
  sd::PathFileHeader header;
  const sd::ObservedPath path = sd::load_path(path_file, &header);
  sd::Vector theta = sd::Vector::Zero(path.p());
  if (!theta_str.empty()) {
    const auto vals = parse_number_list(theta_str);
    if (static_cast<int>(vals.size()) != path.p())
      throw std::invalid_argument("--theta must list exactly p values");
    for (int i = 0; i < path.p(); ++i) theta[i] = vals[i];
  }

  const sd::ScoreReport rep = sd::make_score_report(path, theta);
  std::printf("n=%d p=%d delta=%.10g\n", path.n, path.p(), path.delta());
  print_vector("psi", rep.psi);
  std::printf("||psi||_inf = %.10g\n", sd::lq_norm(rep.psi, sd::kInf));
  std::printf("epsilon_n(theta as theta0) = %.10g\n", rep.eps);

  if (!config.empty()) {
    sd::ExperimentConfig cfg = load_config(config);
    sd::ModelSpec ms = cfg.model_for(path.n);
    if (ms.digest() != header.spec_digest)
      throw std::invalid_argument(
          "config does not match the spec digest stored in the path file");
    const sd::CovariatePath cov = sd::generate_covariates(ms, header.cov_seed);
    const sd::SimulationRecord rec = sd::simulate_record(ms, cov, header.path_seed);
    const sd::ScoreDecomposition dec = sd::score_decomposition(rec, ms.theta0, ms.drift);
    print_vector("A", dec.a);
    print_vector("B", dec.b);
    print_vector("C", dec.c);
    print_vector("D", dec.d);
    print_vector("E", dec.e);
    const sd::Vector psi_b = sd::score(path, ms.theta0, ms.drift);
    std::printf("||A+B+C - psi_n(b;theta0)||_inf = %.3e\n",
                sd::lq_norm(dec.abc_sum() - psi_b, sd::kInf));
  } else {
    std::printf("(score decomposition needs --config to rebuild the fine grid)\n");
  }
  return 0;
}

int cmd_estimate(const std::string& path_file, double gamma, double k0, double alpha) {
  const sd::ObservedPath path = sd::load_path(path_file);
  if (gamma <= 0.0) {
    sd::TuningRule rule;
    rule.k0 = k0;
    rule.alpha = alpha;
    rule.zeta = alpha;  // records the design constraint; not used here
    gamma = sd::gamma_n(rule, path.n);
  }
  const sd::EstimateResult est = sd::estimate(path, gamma);
  std::printf("gamma       %.10g\n", gamma);
  print_sparse("theta_hat", est.theta_hat);
  std::printf("objective   %.10g\n", est.objective);
  std::printf("feasible    %s\n", est.feasible ? "yes" : "no");
  std::printf("status      %s\n", sd::to_string(est.solver_status).c_str());
  std::printf("iterations  %d\n", est.iterations);
  return 0;
}

int cmd_factors(const std::string& path_file, const std::string& matrix_file,
                const std::string& support_str, const std::string& q_str) {
  sd::Matrix j;
  if (!matrix_file.empty())
    j = read_matrix_file(matrix_file);
  else
    j = sd::j_matrix(sd::load_path(path_file));
  const std::vector<int> t0 = parse_index_list(support_str);
  std::vector<double> qs;
  {
    std::stringstream ss(q_str);
    std::string tok;
    while (std::getline(ss, tok, ','))
      qs.push_back(tok == "inf" ? sd::kInf : std::stod(tok));
  }
  print_factor_report(sd::factor_report(j, t0, qs));
  return 0;
}

int cmd_experiment(const std::string& config, const std::string& out_dir,
                   std::uint64_t seed, bool seed_set, int threads) {
  sd::ExperimentConfig cfg = load_config(config);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (seed_set) cfg.master_seed = seed;
  if (threads >= 0) cfg.threads = threads;
  if (cfg.out_dir.empty()) throw std::invalid_argument("experiment needs out_dir");
  const sd::ExperimentResult res = sd::run_experiment(cfg);
  std::printf("%zu records -> %s\n", res.records.size(), cfg.out_dir.c_str());
  for (const auto& s : res.summary)
    std::printf("n=%-6d feas(6g)=%.2f med err_l2=%.4g med eps=%.4g\n", s.n,
                s.feas_6gamma_freq, s.err_l2_med, s.eps_med);
  return 0;
}

int cmd_verify(const std::string& records_file) {
  const sd::RecordsFile rf = sd::read_records_csv(records_file);
  if (rf.records.empty()) {
    std::fprintf(stderr, "no records\n");
    return 1;
  }
  const sd::BoundReport rep = sd::verify_bounds(rf.records, rf.meta);
  std::printf("records             %d\n", rep.total_records);
  std::printf("feasible at gamma   %d\n", rep.feasible_records);
  if (rep.vacuous) {
    std::printf("report vacuous: no feasible replicates\n");
    return 0;
  }
  auto show = [](const char* name, const sd::BoundStat& st) {
    std::printf("%-18s checked=%-5d violated=%-5d na=%-5d median_slack=%.6g\n", name,
                st.checked, st.violated, st.not_applicable, st.median_slack);
  };
  show("l2 bound (a)", rep.l2_bound);
  show("linf bound (b)", rep.linf_bound);
  show("l1 bound (c)", rep.l1_bound);
  show("lq bound (d,q=2)", rep.lq_bound);
  return 0;
}

int cmd_plot(const std::string& summary_file, const std::string& out_dir) {
  const auto rows = sd::read_summary_csv(summary_file);
  if (rows.empty()) {
    std::fprintf(stderr, "no summary rows\n");
    return 1;
  }
  sd::write_error_plots(out_dir, rows);
  std::printf("wrote error plots to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse diffusion toolkit"};
  app.require_subcommand(1);

  std::string config, out = "path.bin", path_file, theta_str, matrix_file;
  std::string support_str, q_str = "2,inf", records_file, summary_file, out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double gamma = 0.0, k0 = 1.0, alpha = 0.2;
  int threads = -1;

  auto* sim = app.add_subcommand("simulate", "simulate a path and write a path file");
  sim->add_option("--config", config, "experiment config file")->required();
  sim->add_option("--seed", seed, "override master_seed")->each([&](const std::string&) {
    seed_set = true;
  });
  sim->add_option("--out", out, "output path file");

  auto* sc = app.add_subcommand("score", "print psi_n / epsilon_n / decomposition");
  sc->add_option("--path", path_file, "path file")->required();
  sc->add_option("--theta", theta_str, "comma-separated theta (defaults to 0)");
  sc->add_option("--config", config, "config for fine-grid re-simulation");

  auto* est = app.add_subcommand("estimate", "run the selector on a path file");
  est->add_option("--path", path_file, "path file")->required();
  est->add_option("--gamma", gamma, "constraint radius (overrides K0/alpha)");
  est->add_option("--K0", k0, "tuning constant K0");
  est->add_option("--alpha", alpha, "tuning exponent alpha");

  auto* fac = app.add_subcommand("factors", "cone-restricted factors of J_n");
  fac->add_option("--path", path_file, "path file (J_n computed from it)");
  fac->add_option("--matrix", matrix_file, "whitespace matrix file (instead of --path)");
  fac->add_option("--support", support_str, "comma-separated support indices")->required();
  fac->add_option("--q", q_str, "comma-separated q list, e.g. 1,2,inf");

  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  exp->add_option("--config", config, "experiment config file")->required();
  exp->add_option("--out", out_dir, "output directory (overrides config out_dir)");
  exp->add_option("--seed", seed, "override master_seed")->each([&](const std::string&) {
    seed_set = true;
  });
  exp->add_option("--threads", threads, "worker threads (0 = hardware)");

  auto* ver = app.add_subcommand("verify", "audit theorem bounds on a records CSV");
  ver->add_option("--records", records_file, "records.csv")->required();

  auto* plt = app.add_subcommand("plot", "regenerate SVGs from a summary CSV");
  plt->add_option("--summary", summary_file, "summary.csv")->required();
  plt->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config, seed, seed_set, out);
    if (sc->parsed()) return cmd_score(path_file, theta_str, config);
    if (est->parsed()) return cmd_estimate(path_file, gamma, k0, alpha);
    if (fac->parsed()) return cmd_factors(path_file, matrix_file, support_str, q_str);
    if (exp->parsed()) return cmd_experiment(config, out_dir, seed, seed_set, threads);
    if (ver->parsed()) return cmd_verify(records_file);
    if (plt->parsed()) return cmd_plot(summary_file, out_dir);
  } catch (const sd::io_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 2;
  } catch (const sd::format_error& e) {
    std::fprintf(stderr, "format error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
