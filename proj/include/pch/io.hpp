#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pch/best_response.hpp"
#include "pch/data_bench.hpp"
#include "pch/dual_program.hpp"
#include "pch/reduce_solve.hpp"
#include "pch/spectral.hpp"

namespace pch::io {

// Sectioned plain-text QP format:
//
//   pchqp 1
//   n 3
//   m 1
//   Q
//   2 0 0
//   0 1 0
//   0 0 1
//   c
//   -1 0 1
//   A
//   1 1 1
//   b
//   1
//   s 2          (optional)
//   eta 10       (optional)
//   theta 0.1    (optional)
//
// '#' starts a comment. Sections may appear in any order after n and m.
struct RawQP {
  MatrixXd Q;
  VectorXd c;
  MatrixXd A;
  VectorXd b;
  std::optional<int> s;
  std::optional<double> eta;
  std::optional<double> theta;
};

RawQP parse_qp(const std::string& text);
RawQP read_qp_file(const std::filesystem::path& path);
std::string format_qp(const RawQP& qp);

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Result of the solve/screen/penalized pipelines as written to JSON.
struct SolveReport {
  std::string command;
  std::string method;
  int k = 0;
  int k_hat = 0;
  bool k_auto = false;
  Index n = 0;
  int s = 0;
  double eta = 0.0;
  std::optional<double> theta;
  int iterations = 0;
  bool certificate = false;
  std::optional<int> cycle_period;
  std::vector<Index> screened_support;
  std::optional<SparseSolution> solution;
  std::optional<double> seconds;

  friend bool operator==(const SolveReport&, const SolveReport&);
};

std::string to_json(const SolveReport& report);
SolveReport parse_solve_report(const std::string& json_text);

// Result tables: CSV with the fixed column order
//   cell,method,n,N,N_test,s_true,s,rho,snr,eta,k,metric,mean,std,reps
// and a JSON mirror (array of objects with the same keys).
std::string grid_to_csv(const std::vector<GridRow>& rows);
std::vector<GridRow> grid_from_csv(const std::string& text);
std::string grid_to_json(const std::vector<GridRow>& rows);
std::vector<GridRow> grid_from_json(const std::string& text);

// Per-iteration traces.
std::string br_trace_csv(const BRTrace& trace);
std::string dp_trace_csv(const DPTrace& trace);

struct SpectrumReport {
  Spectrum spectrum;
  std::vector<double> errors;  // frobenius_error(k), k = 1..n
  int k_hat = 1;
  std::optional<double> ratio_1_10;
};

SpectrumReport make_spectrum_report(const MatrixXd& Q);
std::string spectrum_to_csv(const SpectrumReport& r);
std::string spectrum_to_json(const SpectrumReport& r);

void write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

}  // namespace pch::io
