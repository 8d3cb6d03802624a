#include "pch/io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pch::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

class Tokens {
 public:
  explicit Tokens(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      ++line_;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) items_.push_back({tok, line_});
    }
  }
  bool done() const { return pos_ >= items_.size(); }
  std::string next(const char* what) {
    if (done()) throw DataError(std::string("QP file ended while reading ") + what);
    return items_[pos_++].text;
  }
  int line() const { return pos_ > 0 ? items_[pos_ - 1].line : 0; }
  double number(const char* what) {
    const std::string tok = next(what);
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw DataError("QP file line " + std::to_string(line()) + ": expected a number for " +
                      what + ", got '" + tok + "'");
    }
    return v;
  }
  long integer(const char* what) {
    const double v = number(what);
    if (v != static_cast<double>(static_cast<long>(v))) {
      throw DataError("QP file line " + std::to_string(line()) + ": " + what +
                      " must be an integer");
    }
    return static_cast<long>(v);
  }

 private:
  struct Item {
    std::string text;
    int line;
  };
  std::vector<Item> items_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

}  // namespace

RawQP parse_qp(const std::string& text) {
  Tokens tok(text);
  if (tok.next("header") != "pchqp") throw DataError("QP file must start with 'pchqp'");
  if (tok.integer("version") != 1) throw DataError("unsupported QP file version");

  long n = -1, m = 0;
  RawQP qp;
  bool have_Q = false, have_c = false, have_A = false, have_b = false;
  while (!tok.done()) {
    const std::string key = tok.next("section");
    if (key == "n") {
      n = tok.integer("n");
      if (n < 1) throw DataError("n must be positive");
    } else if (key == "m") {
      m = tok.integer("m");
      if (m < 0) throw DataError("m must be nonnegative");
    } else if (key == "Q" || key == "c" || key == "A" || key == "b") {
      if (n < 1) throw DataError("section " + key + " appears before n");
      if (key == "Q") {
        qp.Q.resize(n, n);
        for (long i = 0; i < n; ++i)
          for (long j = 0; j < n; ++j) qp.Q(i, j) = tok.number("Q entry");
        have_Q = true;
      } else if (key == "c") {
        qp.c.resize(n);
        for (long i = 0; i < n; ++i) qp.c(i) = tok.number("c entry");
        have_c = true;
      } else if (key == "A") {
        qp.A.resize(m, n);
        for (long i = 0; i < m; ++i)
          for (long j = 0; j < n; ++j) qp.A(i, j) = tok.number("A entry");
        have_A = true;
      } else {
        qp.b.resize(m);
        for (long i = 0; i < m; ++i) qp.b(i) = tok.number("b entry");
        have_b = true;
      }
    } else if (key == "s") {
      qp.s = static_cast<int>(tok.integer("s"));
    } else if (key == "eta") {
      qp.eta = tok.number("eta");
    } else if (key == "theta") {
      qp.theta = tok.number("theta");
    } else {
      throw DataError("QP file line " + std::to_string(tok.line()) +
                      ": unknown section '" + key + "'");
    }
  }
  if (n < 1 || !have_Q) throw DataError("QP file needs n and Q");
  if (!have_c) qp.c = VectorXd::Zero(n);
  if (m > 0 && (!have_A || !have_b)) throw DataError("QP file declares m > 0 without A and b");
  if (m == 0) {
    qp.A.resize(0, n);
    qp.b.resize(0);
  }
  return qp;
}

RawQP read_qp_file(const std::filesystem::path& path) { return parse_qp(read_file(path)); }

std::string format_qp(const RawQP& qp) {
  std::ostringstream out;
  out << "pchqp 1\nn " << qp.Q.rows() << "\nm " << qp.A.rows() << "\nQ\n";
  for (Index i = 0; i < qp.Q.rows(); ++i) {
    for (Index j = 0; j < qp.Q.cols(); ++j) out << (j ? " " : "") << format_double(qp.Q(i, j));
    out << "\n";
  }
  out << "c\n";
  for (Index i = 0; i < qp.c.size(); ++i) out << (i ? " " : "") << format_double(qp.c(i));
  out << "\n";
  if (qp.A.rows() > 0) {
    out << "A\n";
    for (Index i = 0; i < qp.A.rows(); ++i) {
      for (Index j = 0; j < qp.A.cols(); ++j) out << (j ? " " : "") << format_double(qp.A(i, j));
      out << "\n";
    }
    out << "b\n";
    for (Index i = 0; i < qp.b.size(); ++i) out << (i ? " " : "") << format_double(qp.b(i));
    out << "\n";
  }
  if (qp.s) out << "s " << *qp.s << "\n";
  if (qp.eta) out << "eta " << format_double(*qp.eta) << "\n";
  if (qp.theta) out << "theta " << format_double(*qp.theta) << "\n";
  return out.str();
}

namespace {

json vec_json(const VectorXd& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

VectorXd json_vec(const json& a) {
  VectorXd v(static_cast<Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
  return v;
}

}  // namespace

bool operator==(const SolveReport& a, const SolveReport& b) {
  const auto same_solution = [](const std::optional<SparseSolution>& x,
                                const std::optional<SparseSolution>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->x.size() == y->x.size() && x->x == y->x && x->support == y->support &&
           x->objective == y->objective && x->exact == y->exact && x->big_m == y->big_m &&
           x->big_m_binding == y->big_m_binding &&
           x->subsets_evaluated == y->subsets_evaluated;
  };
  return a.command == b.command && a.method == b.method && a.k == b.k &&
         a.k_hat == b.k_hat && a.k_auto == b.k_auto && a.n == b.n && a.s == b.s &&
         a.eta == b.eta && a.theta == b.theta && a.iterations == b.iterations &&
         a.certificate == b.certificate && a.cycle_period == b.cycle_period &&
         a.screened_support == b.screened_support &&
         same_solution(a.solution, b.solution) && a.seconds == b.seconds;
}

std::string to_json(const SolveReport& r) {
  json j;
  j["command"] = r.command;
  j["method"] = r.method;
  j["k"] = r.k;
  j["k_hat"] = r.k_hat;
  j["k_auto"] = r.k_auto;
  j["n"] = r.n;
  j["s"] = r.s;
  j["eta"] = r.eta;
  j["theta"] = r.theta ? json(*r.theta) : json(nullptr);
  j["iterations"] = r.iterations;
  j["certificate"] = r.certificate;
  j["cycle_period"] = r.cycle_period ? json(*r.cycle_period) : json(nullptr);
  j["screened_support"] = r.screened_support;
  j["screened_size"] = r.screened_support.size();
  if (r.solution) {
    const SparseSolution& s = *r.solution;
    json sol;
    sol["x"] = vec_json(s.x);
    sol["support"] = s.support;
    sol["objective"] = s.objective;
    sol["exact"] = s.exact;
    sol["big_m"] = s.big_m ? json(*s.big_m) : json(nullptr);
    sol["big_m_binding"] = s.big_m_binding;
    sol["subsets_evaluated"] = s.subsets_evaluated;
    j["solution"] = sol;
  } else {
    j["solution"] = nullptr;
  }
  if (r.seconds) j["timings"] = {{"total_seconds", *r.seconds}};
  return j.dump(2) + "\n";
}

SolveReport parse_solve_report(const std::string& text) {
  SolveReport r;
  try {
    const json j = json::parse(text);
    r.command = j.at("command").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.k = j.at("k").get<int>();
    r.k_hat = j.at("k_hat").get<int>();
    r.k_auto = j.at("k_auto").get<bool>();
    r.n = j.at("n").get<Index>();
    r.s = j.at("s").get<int>();
    r.eta = j.at("eta").get<double>();
    if (!j.at("theta").is_null()) r.theta = j.at("theta").get<double>();
    r.iterations = j.at("iterations").get<int>();
    r.certificate = j.at("certificate").get<bool>();
    if (!j.at("cycle_period").is_null()) r.cycle_period = j.at("cycle_period").get<int>();
    r.screened_support = j.at("screened_support").get<std::vector<Index>>();
    if (!j.at("solution").is_null()) {
      const json& sj = j.at("solution");
      SparseSolution s;
      s.x = json_vec(sj.at("x"));
      s.support = sj.at("support").get<std::vector<Index>>();
      s.objective = sj.at("objective").get<double>();
      s.exact = sj.at("exact").get<bool>();
      if (!sj.at("big_m").is_null()) s.big_m = sj.at("big_m").get<double>();
      s.big_m_binding = sj.at("big_m_binding").get<bool>();
      s.subsets_evaluated = sj.at("subsets_evaluated").get<std::uint64_t>();
      r.solution = std::move(s);
    }
    if (j.contains("timings")) r.seconds = j.at("timings").at("total_seconds").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed solution JSON: ") + e.what());
  }
  return r;
}

namespace {

const char* kGridHeader = "cell,method,n,N,N_test,s_true,s,rho,snr,eta,k,metric,mean,std,reps";

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("malformed number '" + s + "' in table");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("malformed integer '" + s + "' in table");
  }
  return v;
}

}  // namespace

std::string grid_to_csv(const std::vector<GridRow>& rows) {
  std::ostringstream out;
  out << kGridHeader << "\n";
  for (const GridRow& r : rows) {
    const GridCell& c = r.params;
    out << r.cell << ',' << to_string(c.method) << ',' << c.data.n << ',' << c.data.N << ','
        << c.data.N_test << ',' << c.data.s_true << ',' << c.s << ',' << format_double(c.data.rho) << ',' << format_double(c.data.snr) << ','
        << format_double(c.eta) << ',' << c.k << ',' << r.metric << ','
        << format_double(r.mean) << ',' << format_double(r.std) << ',' << r.reps << "\n";
  }
  return out.str();
}

std::vector<GridRow> grid_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kGridHeader) {
    throw DataError("result table has an unexpected header");
  }
  std::vector<GridRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 15) throw DataError("result table row has the wrong field count");
    GridRow r;
    r.cell = to_int(f[0]);
    r.params.method = parse_method(f[1]);
    r.params.data.n = to_int(f[2]);
    r.params.data.N = to_int(f[3]);
    r.params.data.N_test = to_int(f[4]);
    r.params.data.s_true = to_int(f[5]);
    r.params.s = to_int(f[6]);
    r.params.data.rho = to_double(f[7]);
    r.params.data.snr = to_double(f[8]);
    r.params.eta = to_double(f[9]);
    r.params.k = to_int(f[10]);
    r.metric = f[11];
    r.mean = to_double(f[12]);
    r.std = to_double(f[13]);
    r.reps = to_int(f[14]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string grid_to_json(const std::vector<GridRow>& rows) {
  json a = json::array();
  for (const GridRow& r : rows) {
    const GridCell& c = r.params;
    a.push_back({{"cell", r.cell},       {"method", to_string(c.method)},
                 {"n", c.data.n},        {"N", c.data.N},
                 {"N_test", c.data.N_test}, {"s_true", c.data.s_true},
                 {"s", c.s},             {"rho", c.data.rho},
                 {"snr", c.data.snr},    {"eta", c.eta},
                 {"k", c.k},             {"metric", r.metric},
                 {"mean", r.mean},       {"std", r.std},
                 {"reps", r.reps}});
  }
  return a.dump(2) + "\n";
}

std::vector<GridRow> grid_from_json(const std::string& text) {
  std::vector<GridRow> rows;
  try {
    for (const json& o : json::parse(text)) {
      GridRow r;
      r.cell = o.at("cell").get<int>();
      r.params.method = parse_method(o.at("method").get<std::string>());
      r.params.data.n = o.at("n").get<int>();
      r.params.data.N = o.at("N").get<int>();
      r.params.data.N_test = o.at("N_test").get<int>();
      r.params.data.s_true = o.at("s_true").get<int>();
      r.params.s = o.at("s").get<int>();
      r.params.data.rho = o.at("rho").get<double>();
      r.params.data.snr = o.at("snr").get<double>();
      r.params.eta = o.at("eta").get<double>();
      r.params.k = o.at("k").get<int>();
      r.metric = o.at("metric").get<std::string>();
      r.mean = o.at("mean").get<double>();
      r.std = o.at("std").get<double>();
      r.reps = o.at("reps").get<int>();
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed result table JSON: ") + e.what());
  }
  return rows;
}

namespace {

std::string support_field(const SupportVector& z) {
  std::string out;
  for (Index j : z.indices()) {
    if (!out.empty()) out += ' ';
    out += std::to_string(j);
  }
  return out;
}

}  // namespace

std::string br_trace_csv(const BRTrace& trace) {
  std::ostringstream out;
  out << "iter,value,support_size,alpha_norm,support\n";
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    const BRIterate& it = trace.iterates[t];
    out << t << ',' << format_double(it.value) << ',' << it.z.count() << ','
        << format_double(it.dual.alpha.norm()) << ',' << support_field(it.z) << "\n";
  }
  return out.str();
}

std::string dp_trace_csv(const DPTrace& trace) {
  std::ostringstream out;
  out << "iter,kappa,f,best_f,support_size,alpha_norm,support\n";
  for (std::size_t t = 0; t < trace.iterates.size(); ++t) {
    const DPIterate& it = trace.iterates[t];
    out << (t + 1) << ',' << format_double(it.kappa) << ',' << format_double(it.f) << ','
        << format_double(trace.best_f_history[t]) << ',' << it.z.count() << ','
        << format_double(it.dual.alpha.norm()) << ',' << support_field(it.z) << "\n";
  }
  return out.str();
}

SpectrumReport make_spectrum_report(const MatrixXd& Q) {
  SpectrumReport r;
  r.spectrum = eig_sym(Q);
  const int n = static_cast<int>(r.spectrum.n());
  for (int k = 1; k <= n; ++k) r.errors.push_back(frobenius_error(r.spectrum, k));
  r.k_hat = k_hat(r.spectrum);
  r.ratio_1_10 = leading_ratio(r.spectrum, 10);
  return r;
}

std::string spectrum_to_csv(const SpectrumReport& r) {
  std::ostringstream out;
  out << "# k_hat," << r.k_hat << "\n";
  out << "# lambda1_over_lambda10," << (r.ratio_1_10 ? format_double(*r.ratio_1_10) : "NA")
      << "\n";
  out << "k,eigenvalue,frobenius_error\n";
  for (std::size_t i = 0; i < r.errors.size(); ++i) {
    out << (i + 1) << ',' << format_double(r.spectrum.eigenvalues(static_cast<Index>(i)))
        << ',' << format_double(r.errors[i]) << "\n";
  }
  return out.str();
}

std::string spectrum_to_json(const SpectrumReport& r) {
  json j;
  j["eigenvalues"] = vec_json(r.spectrum.eigenvalues);
  j["frobenius_error"] = r.errors;
  j["k_hat"] = r.k_hat;
  j["lambda1_over_lambda10"] = r.ratio_1_10 ? json(*r.ratio_1_10) : json(nullptr);
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("failed writing " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace pch::io
