#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#include "pch/best_response.hpp"
#include "pch/data_bench.hpp"
#include "pch/dual_program.hpp"
#include "pch/io.hpp"
#include "pch/penalized.hpp"
#include "pch/reduce_solve.hpp"
#include "pch/spectral.hpp"

namespace pch::cli {
namespace {

struct Options {
  std::string method = "br";
  std::string k = "auto";
  std::optional<int> s;
  std::optional<double> eta;
  std::optional<double> theta;
  std::optional<int> iters;
  double step_a = 4e-3;
  std::optional<int> p_window;
  std::uint64_t seed = 0;
  std::string input;
  std::string target = "-1";
  std::string output;
  std::string format;
  double train_fraction = 0.7;
  bool fresh = false;
  bool timings = false;
};

struct BenchOptions {
  int n = 60;
  int N = 200;
  int N_test = 0;
  int s_true = 0;
  double rho = 0.5;
  double snr = 6.0;
  std::vector<double> etas{1e-3, 1e2};
  std::vector<int> ks{24};
  std::vector<std::string> methods{"dp"};
  int reps = 25;
  bool no_solve = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LoadedInput {
  io::RawQP qp;
  bool from_csv = false;
  std::optional<int> n_train;
};

bool looks_like_qp(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  return pos != std::string::npos && text.compare(pos, 5, "pchqp") == 0;
}

LoadedInput load_input(const Options& o) {
  if (o.input.empty()) throw UsageError("--input is required");
  const std::string text = io::read_file(o.input);
  LoadedInput in;
  if (looks_like_qp(text)) {
    in.qp = io::parse_qp(text);
    return in;
  }
  const RegressionData data = parse_csv(text, o.target);
  const Dataset ds = split_normalize(data, o.train_fraction, o.seed);
  const SparseQP reg = from_regression(ds.train, 1, 1.0);
  in.from_csv = true;
  in.n_train = static_cast<int>(ds.train.samples());
  in.qp.Q = reg.Q;
  in.qp.c = reg.c;
  in.qp.A = reg.A;
  in.qp.b = reg.b;
  in.qp.eta = ridge_eta_for(ds);
  return in;
}

template <typename T>
T require(const std::optional<T>& flag, const std::optional<T>& file, const char* name) {
  if (flag) return *flag;
  if (file) return *file;
  throw UsageError(std::string("--") + name + " is required for this input");
}

void emit(const Options& o, std::ostream& out, const std::string& content) {
  if (o.output.empty()) {
    out << content;
  } else {
    io::write_file(o.output, content);
  }
}

struct Resolved {
  SpectralTruncation trunc;
  int k = 1;
  int k_hat = 1;
  bool k_auto = false;
};

Resolved resolve_level(const QuadraticData& p, const std::string& k_flag) {
  const Spectrum spectrum = eig_sym(p.Q);
  Resolved r;
  r.k_hat = k_hat(spectrum);
  if (k_flag == "auto") {
    r.k = r.k_hat;
    r.k_auto = true;
  } else {
    try {
      std::size_t used = 0;
      r.k = std::stoi(k_flag, &used);
      if (used != k_flag.size()) throw std::invalid_argument(k_flag);
    } catch (const std::exception&) {
      throw UsageError("--k must be an integer or 'auto'");
    }
  }
  r.trunc = truncate(spectrum, r.k);
  return r;
}

struct Screen {
  SupportVector Z;
  SupportVector terminal;
  int iterations = 0;
  bool certificate = false;
  std::optional<int> cycle_period;
  std::string trace_csv;
};

Screen screen_br(const BRTrace& trace, int p_window) {
  Screen sc;
  sc.Z = screen_from_trace(trace, p_window);
  sc.terminal = trace.iterates.back().z;
  sc.iterations = static_cast<int>(trace.iterates.size());
  sc.certificate = trace.converged_certificate;
  if (trace.cycle_start) sc.cycle_period = trace.cycle_period;
  sc.trace_csv = io::br_trace_csv(trace);
  return sc;
}

Screen screen_dp(const DPTrace& trace, int p_window) {
  Screen sc;
  sc.Z = screen_from_dp(trace, p_window);
  sc.terminal = trace.iterates.back().z;
  sc.iterations = static_cast<int>(trace.iterates.size());
  sc.certificate = trace.z_converged;
  sc.trace_csv = io::dp_trace_csv(trace);
  return sc;
}

BRConfig br_config(const Options& o) {
  BRConfig cfg;
  if (o.iters) cfg.max_iters = *o.iters;
  cfg.fresh_update = o.fresh;
  return cfg;
}

DPConfig dp_config(const Options& o) {
  DPConfig cfg;
  if (o.iters) cfg.max_iters = *o.iters;
  cfg.step_a = o.step_a;
  if (o.p_window) cfg.p_window = *o.p_window;
  return cfg;
}

int default_window(const Options& o) {
  if (o.p_window) return *o.p_window;
  return o.method == "br" ? 6 : DPConfig{}.p_window;
}

void write_report(const Options& o, std::ostream& out, const io::SolveReport& report,
                  const std::string& trace_csv) {
  emit(o, out, io::to_json(report));
  if (!o.output.empty()) io::write_file(o.output + ".trace.csv", trace_csv);
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int cmd_spectrum(const Options& o, std::ostream& out) {
  const LoadedInput in = load_input(o);
  const io::SpectrumReport r = io::make_spectrum_report(in.qp.Q);
  const std::string format = o.format.empty() ? "csv" : o.format;
  emit(o, out, format == "json" ? io::spectrum_to_json(r) : io::spectrum_to_csv(r));
  return kOk;
}

int cmd_cardinality(const std::string& command, const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  const LoadedInput in = load_input(o);
  const int s = require(o.s, in.qp.s, "s");
  const double eta = require(o.eta, in.qp.eta, "eta");
  const SparseQP p = build_problem(in.qp.Q, in.qp.c, in.qp.A, in.qp.b, s, eta);
  const Resolved lvl = resolve_level(p, o.k);

  Screen sc;
  if (o.method == "br") {
    sc = screen_br(run_best_response(lvl.trunc, p, default_start(p), br_config(o)),
                   default_window(o));
  } else {
    const DPConfig cfg = dp_config(o);
    sc = screen_dp(run_dual_program(lvl.trunc, p, DualPoint::zeros(lvl.k, p.m()), cfg),
                   default_window(o));
  }

  io::SolveReport report;
  report.command = command;
  report.method = o.method;
  report.k = lvl.k;
  report.k_hat = lvl.k_hat;
  report.k_auto = lvl.k_auto;
  report.n = p.n();
  report.s = s;
  report.eta = eta;
  report.iterations = sc.iterations;
  report.certificate = sc.certificate;
  report.cycle_period = sc.cycle_period;
  report.screened_support = sc.Z.indices();
  if (command == "solve") {
    const double M = compute_big_m(p, sc.terminal);
    report.solution = solve_reduced(ReducedProblem::make(p, sc.Z, M), s);
  }
  if (o.timings) report.seconds = seconds_since(start);
  write_report(o, out, report, sc.trace_csv);
  return kOk;
}

int cmd_penalized(const Options& o, std::ostream& out) {
  const auto start = Clock::now();
  const LoadedInput in = load_input(o);
  const double theta = require(o.theta, in.qp.theta, "theta");
  const double eta = require(o.eta, in.qp.eta, "eta");
  const PenalizedQP p =
      build_penalized_problem(in.qp.Q, in.qp.c, in.qp.A, in.qp.b, theta, eta);
  const Resolved lvl = resolve_level(p, o.k);

  Screen sc;
  if (o.method == "br") {
    const SupportVector z0 = select_support_penalized(p.c, p.eta, p.theta);
    sc = screen_br(run_best_response_penalized(lvl.trunc, p, z0, br_config(o)),
                   default_window(o));
  } else {
    sc = screen_dp(run_dual_program_penalized(lvl.trunc, p,
                                              DualPoint::zeros(lvl.k, p.m()), dp_config(o)),
                   default_window(o));
  }

  io::SolveReport report;
  report.command = "penalized";
  report.method = o.method;
  report.k = lvl.k;
  report.k_hat = lvl.k_hat;
  report.k_auto = lvl.k_auto;
  report.n = p.n();
  report.s = 0;
  report.eta = eta;
  report.theta = theta;
  report.iterations = sc.iterations;
  report.certificate = sc.certificate;
  report.cycle_period = sc.cycle_period;
  report.screened_support = sc.Z.indices();
  report.solution = solve_reduced_penalized(p, sc.Z);
  if (o.timings) report.seconds = seconds_since(start);
  write_report(o, out, report, sc.trace_csv);
  return kOk;
}

int cmd_bench(const Options& o, const BenchOptions& b, std::ostream& out) {
  GridConfig cfg;
  cfg.replications = b.reps;
  cfg.master_seed = o.seed;
  cfg.br = br_config(o);
  cfg.dp = dp_config(o);
  if (o.p_window) cfg.p_window_br = *o.p_window;
  cfg.solve = !b.no_solve;
  cfg.record_timings = o.timings;
  const int s = o.s.value_or(5);
  for (const std::string& m : b.methods) {
    for (double eta : b.etas) {
      for (int k : b.ks) {
        GridCell cell;
        cell.data = SyntheticSpec{b.n, b.N, b.s_true > 0 ? b.s_true : s, b.rho, b.snr, 0,
                                  b.N_test};
        cell.method = parse_method(m);
        cell.s = s;
        cell.eta = eta;
        cell.k = k;
        cfg.cells.push_back(cell);
      }
    }
  }
  const std::vector<GridRow> rows = run_grid(cfg);
  const std::string format = o.format.empty() ? "csv" : o.format;
  emit(o, out, format == "json" ? io::grid_to_json(rows) : io::grid_to_csv(rows));
  return kOk;
}

void add_common(CLI::App* app, Options& o, bool solver) {
  app->add_option("--input", o.input, "QP text file (pchqp) or CSV regression data");
  app->add_option("--target", o.target, "CSV target column: name or index (-1 = last)");
  app->add_option("--output", o.output, "output path (default: stdout)");
  app->add_option("--seed", o.seed, "seed for the train/test split and synthetic data");
  app->add_option("--train-fraction", o.train_fraction, "CSV rows used for training")
      ->check(CLI::Range(0.0, 1.0));
  if (!solver) return;
  app->add_option("--method", o.method)->check(CLI::IsMember({"br", "dp"}));
  app->add_option("--k", o.k, "hierarchy level or 'auto'");
  app->add_option("--eta", o.eta)->check(CLI::PositiveNumber);
  app->add_option("--iters", o.iters)->check(CLI::PositiveNumber);
  app->add_option("--step-a", o.step_a)->check(CLI::PositiveNumber);
  app->add_option("--p-window", o.p_window)->check(CLI::PositiveNumber);
  app->add_flag("--fresh", o.fresh, "select z from the fresh duals in best response");
  app->add_flag("--timings", o.timings, "include wall time in the output");
}

std::string error_json(const std::string& kind, const std::string& message) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  return j.dump() + "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Screening and exact solving for cardinality-constrained quadratic programs"};
  app.require_subcommand(1);
  Options o;
  BenchOptions b;

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues and truncation errors of Q");
  add_common(spectrum, o, false);
  spectrum->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));

  auto* solve = app.add_subcommand("solve", "screen, then solve the reduced problem");
  auto* screen = app.add_subcommand("screen", "screening only");
  for (auto* sub : {solve, screen}) {
    add_common(sub, o, true);
    sub->add_option("--s", o.s)->check(CLI::PositiveNumber);
    sub->add_option("--format", o.format)->check(CLI::IsMember({"json"}));
  }

  auto* penalized = app.add_subcommand("penalized", "l0-penalized variant");
  add_common(penalized, o, true);
  penalized->add_option("--theta", o.theta)->check(CLI::NonNegativeNumber);
  penalized->add_option("--format", o.format)->check(CLI::IsMember({"json"}));

  auto* bench = app.add_subcommand("bench", "synthetic benchmark grid");
  bench->add_option("--output", o.output);
  bench->add_option("--seed", o.seed, "master seed");
  bench->add_option("--format", o.format)->check(CLI::IsMember({"csv", "json"}));
  bench->add_option("--s", o.s)->check(CLI::PositiveNumber);
  bench->add_option("--iters", o.iters)->check(CLI::PositiveNumber);
  bench->add_option("--step-a", o.step_a)->check(CLI::PositiveNumber);
  bench->add_option("--p-window", o.p_window)->check(CLI::PositiveNumber);
  bench->add_flag("--fresh", o.fresh);
  bench->add_flag("--timings", o.timings);
  bench->add_option("--n", b.n)->check(CLI::PositiveNumber);
  bench->add_option("--N", b.N)->check(CLI::PositiveNumber);
  bench->add_option("--N-test", b.N_test)->check(CLI::NonNegativeNumber);
  bench->add_option("--s-true", b.s_true, "planted support size (default: --s)");
  bench->add_option("--rho", b.rho)->check(CLI::Range(0.0, 1.0));
  bench->add_option("--snr", b.snr)->check(CLI::PositiveNumber);
  bench->add_option("--eta", b.etas, "comma-separated list")->delimiter(',');
  bench->add_option("--k", b.ks, "comma-separated list")->delimiter(',');
  bench->add_option("--method", b.methods, "comma-separated list of br,dp")
      ->delimiter(',')
      ->check(CLI::IsMember({"br", "dp"}));
  bench->add_option("--reps", b.reps)->check(CLI::PositiveNumber);
  bench->add_flag("--no-solve", b.no_solve, "skip the exact reduced solve");

  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << error_json("usage", e.what());
    return kUsage;
  }

  try {
    if (spectrum->parsed()) return cmd_spectrum(o, out);
    if (solve->parsed()) return cmd_cardinality("solve", o, out);
    if (screen->parsed()) return cmd_cardinality("screen", o, out);
    if (penalized->parsed()) return cmd_penalized(o, out);
    return cmd_bench(o, b, out);
  } catch (const UsageError& e) {
    err << error_json("usage", e.what());
    return kUsage;
  } catch (const NumericalFailure& e) {
    err << error_json("numerical", e.what());
    return kNumerical;
  } catch (const DataError& e) {
    err << error_json("data", e.what());
    return kData;
  } catch (const InvalidProblem& e) {
    err << error_json("data", e.what());
    return kData;
  }
}

}  // namespace pch::cli
