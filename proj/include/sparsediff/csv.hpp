#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sparsediff/experiment.hpp"

namespace sparsediff {

namespace detail_csv {

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  return std::stod(s);
}

}  // namespace detail_csv

inline constexpr char kRecordsSchema[] = "# sparse-diff records v1";
inline constexpr char kSummarySchema[] = "# sparse-diff summary v1";
inline constexpr char kRecordsHeader[] =
    "n,p,replicate,seed,gamma_n,feas_gamma,feas_6gamma,epsilon_n,kappa,re,f2,finf,"
    "err_l1,err_l2,err_linf,bound_a_slack,bound_c_slack,solver_status,runtime_ms";

inline void write_records_csv(const std::string& dest,
                              const std::vector<ReplicateRecord>& records,
                              const BoundMeta& meta) {
  std::ofstream out(dest, std::ios::trunc);
  if (!out) throw io_error("write_records_csv: cannot open " + dest);
  using detail_csv::fmt;
  out << kRecordsSchema << "\n";
  if (meta.present) {
    out << "# meta theta0_l1 " << fmt(meta.theta0_l1) << "\n"
        << "# meta cov_bound " << fmt(meta.cov_bound) << "\n"
        << "# meta sparsity " << meta.sparsity << "\n";
  }
  out << kRecordsHeader << "\n";
  for (const auto& r : records) {
    out << r.n << ',' << r.p << ',' << r.replicate << ',' << r.seed << ','
        << fmt(r.gamma) << ',' << (r.feas_gamma ? 1 : 0) << ',' << (r.feas_6gamma ? 1 : 0)
        << ',' << fmt(r.eps) << ',' << fmt(r.kappa) << ',' << fmt(r.re) << ','
        << fmt(r.f2) << ',' << fmt(r.finf) << ',' << fmt(r.err_l1) << ','
        << fmt(r.err_l2) << ',' << fmt(r.err_linf) << ',' << fmt(r.bound_a_slack) << ','
        << fmt(r.bound_c_slack) << ',' << to_string(r.solver_status) << ','
        << fmt(r.runtime_ms) << "\n";
  }
  if (!out) throw io_error("write_records_csv: write failed for " + dest);
}

struct RecordsFile {
  std::vector<ReplicateRecord> records;
  BoundMeta meta;
};

inline RecordsFile read_records_csv(const std::string& src) {
  std::ifstream in(src);
  if (!in) throw io_error("read_records_csv: cannot open " + src);
  RecordsFile out;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line);
      std::string hash, tag, key;
      ls >> hash >> tag >> key;
      if (tag == "meta") {
        std::string value;
        ls >> value;
        if (key == "theta0_l1") {
          out.meta.theta0_l1 = detail_csv::parse_double(value);
          out.meta.present = true;
        } else if (key == "cov_bound") {
          out.meta.cov_bound = detail_csv::parse_double(value);
        } else if (key == "sparsity") {
          out.meta.sparsity = std::stoi(value);
        }
      }
      continue;
    }
    if (!saw_header) {
      if (line != kRecordsHeader) throw format_error("read_records_csv: unexpected header");
      saw_header = true;
      continue;
    }
    const auto f = detail_config::split(line, ',');
    if (f.size() != 19) throw format_error("read_records_csv: wrong column count");
    ReplicateRecord r;
    r.n = std::stoi(f[0]);
    r.p = std::stoi(f[1]);
    r.replicate = std::stoi(f[2]);
    r.seed = std::stoull(f[3]);
    r.gamma = detail_csv::parse_double(f[4]);
    r.feas_gamma = f[5] == "1";
    r.feas_6gamma = f[6] == "1";
    r.eps = detail_csv::parse_double(f[7]);
    r.kappa = detail_csv::parse_double(f[8]);
    r.re = detail_csv::parse_double(f[9]);
    r.f2 = detail_csv::parse_double(f[10]);
    r.finf = detail_csv::parse_double(f[11]);
    r.err_l1 = detail_csv::parse_double(f[12]);
    r.err_l2 = detail_csv::parse_double(f[13]);
    r.err_linf = detail_csv::parse_double(f[14]);
    r.bound_a_slack = detail_csv::parse_double(f[15]);
    r.bound_c_slack = detail_csv::parse_double(f[16]);
    r.solver_status = solver_status_from_string(f[17]);
    r.runtime_ms = detail_csv::parse_double(f[18]);
    out.records.push_back(r);
  }
  if (!saw_header) throw format_error("read_records_csv: missing header");
  return out;
}

inline constexpr char kSummaryHeader[] =
    "n,p,replicates,gamma_n,feas_gamma_freq,feas_6gamma_freq,"
    "epsilon_med,epsilon_q25,epsilon_q75,kappa_med,kappa_q25,kappa_q75,"
    "re_med,re_q25,re_q75,f2_med,f2_q25,f2_q75,finf_med,finf_q25,finf_q75,"
    "err_l1_med,err_l1_q25,err_l1_q75,err_l2_med,err_l2_q25,err_l2_q75,"
    "err_linf_med,err_linf_q25,err_linf_q75,"
    "bound_a_checked,bound_a_violations,bound_c_checked,bound_c_violations";

inline void write_summary_csv(const std::string& dest, const std::vector<SummaryRow>& rows) {
  std::ofstream out(dest, std::ios::trunc);
  if (!out) throw io_error("write_summary_csv: cannot open " + dest);
  using detail_csv::fmt;
  out << kSummarySchema << "\n" << kSummaryHeader << "\n";
  for (const auto& s : rows) {
    out << s.n << ',' << s.p << ',' << s.replicates << ',' << fmt(s.gamma) << ','
        << fmt(s.feas_gamma_freq) << ',' << fmt(s.feas_6gamma_freq) << ','
        << fmt(s.eps_med) << ',' << fmt(s.eps_q25) << ',' << fmt(s.eps_q75) << ','
        << fmt(s.kappa_med) << ',' << fmt(s.kappa_q25) << ',' << fmt(s.kappa_q75) << ','
        << fmt(s.re_med) << ',' << fmt(s.re_q25) << ',' << fmt(s.re_q75) << ','
        << fmt(s.f2_med) << ',' << fmt(s.f2_q25) << ',' << fmt(s.f2_q75) << ','
        << fmt(s.finf_med) << ',' << fmt(s.finf_q25) << ',' << fmt(s.finf_q75) << ','
        << fmt(s.err_l1_med) << ',' << fmt(s.err_l1_q25) << ',' << fmt(s.err_l1_q75) << ','
        << fmt(s.err_l2_med) << ',' << fmt(s.err_l2_q25) << ',' << fmt(s.err_l2_q75) << ','
        << fmt(s.err_linf_med) << ',' << fmt(s.err_linf_q25) << ',' << fmt(s.err_linf_q75)
        << ',' << s.bound_a_checked << ',' << s.bound_a_violations << ','
        << s.bound_c_checked << ',' << s.bound_c_violations << "\n";
  }
  if (!out) throw io_error("write_summary_csv: write failed for " + dest);
}

inline std::vector<SummaryRow> read_summary_csv(const std::string& src) {
  std::ifstream in(src);
  if (!in) throw io_error("read_summary_csv: cannot open " + src);
  std::vector<SummaryRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != kSummaryHeader) throw format_error("read_summary_csv: unexpected header");
      saw_header = true;
      continue;
    }
    const auto f = detail_config::split(line, ',');
    if (f.size() != 34) throw format_error("read_summary_csv: wrong column count");
    SummaryRow s;
    int i = 0;
    auto d = [&]() { return detail_csv::parse_double(f[i++]); };
    s.n = std::stoi(f[i++]);
    s.p = std::stoi(f[i++]);
    s.replicates = std::stoi(f[i++]);
    s.gamma = d();
    s.feas_gamma_freq = d();
    s.feas_6gamma_freq = d();
    s.eps_med = d(); s.eps_q25 = d(); s.eps_q75 = d();
    s.kappa_med = d(); s.kappa_q25 = d(); s.kappa_q75 = d();
    s.re_med = d(); s.re_q25 = d(); s.re_q75 = d();
    s.f2_med = d(); s.f2_q25 = d(); s.f2_q75 = d();
    s.finf_med = d(); s.finf_q25 = d(); s.finf_q75 = d();
    s.err_l1_med = d(); s.err_l1_q25 = d(); s.err_l1_q75 = d();
    s.err_l2_med = d(); s.err_l2_q25 = d(); s.err_l2_q75 = d();
    s.err_linf_med = d(); s.err_linf_q25 = d(); s.err_linf_q75 = d();
    s.bound_a_checked = std::stoi(f[i++]);
    s.bound_a_violations = std::stoi(f[i++]);
    s.bound_c_checked = std::stoi(f[i++]);
    s.bound_c_violations = std::stoi(f[i++]);
    rows.push_back(s);
  }
  if (!saw_header) throw format_error("read_summary_csv: missing header");
  return rows;
}

}  // namespace sparsediff
