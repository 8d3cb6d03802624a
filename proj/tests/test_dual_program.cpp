#include <doctest.h>

#include <cmath>

#include "pch/dual_program.hpp"
#include "support.hpp"

using namespace pch;
using namespace pch::testing;

namespace {

struct Instance {
  SparseQP p;
  SpectralTruncation t;
};

Instance random_instance(Rng& rng, Index n, int s, Index m, double eta) {
  SparseQP p = random_problem(rng, n, s, eta, m);
  return {p, truncate(eig_sym(p.Q), uniform_int(rng, 1, static_cast<int>(n)))};
}

// Gap between the s-th and (s+1)-th largest gamma_j^2; f is differentiable
// where this gap is positive.
double selection_gap(const VectorXd& g, int s) {
  std::vector<double> sq(g.size());
  for (Index j = 0; j < g.size(); ++j) sq[j] = g(j) * g(j);
  std::sort(sq.rbegin(), sq.rend());
  return static_cast<std::size_t>(s) < sq.size() ? sq[s - 1] - sq[s] : sq[s - 1];
}

}  // namespace

TEST_CASE("eval_f at zero duals") {
  VectorXd c(4);
  c << 1.0, -3.0, 0.5, 2.0;
  const SparseQP p = build_problem(MatrixXd::Identity(4, 4), c, MatrixXd(0, 4), VectorXd(0), 2, 2.0);
  const SpectralTruncation t = truncate(eig_sym(p.Q), 2);
  const auto [f, z] = eval_f(t, p, DualPoint::zeros(2, 0));
  CHECK(z == SupportVector::from_indices(4, {1, 3}));
  CHECK(f == doctest::Approx(-0.5 * (9.0 + 4.0)));
}

TEST_CASE("eval_f is the exhaustive minimum and is concave") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = uniform_int(rng, 1, 12);
    const int s = uniform_int(rng, 1, static_cast<int>(std::min<Index>(n, 4)));
    const Instance in = random_instance(rng, n, s, uniform_int(rng, 0, 2), uniform(rng, 0.2, 5.0));
    const Index k = in.t.k, m = in.p.m();
    const DualPoint a{random_vector(rng, k), random_vector(rng, m).cwiseAbs()};
    const DualPoint b{random_vector(rng, k), random_vector(rng, m).cwiseAbs()};
    double best = std::numeric_limits<double>::infinity();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask)
      if (popcount(mask) <= s) best = std::min(best, eval_L(in.t, in.p, from_mask(mask, n), a));
    const double fa = eval_f(in.t, in.p, a).first;
    CHECK(rel_diff(fa, best) < 1e-12);
    const DualPoint mid{0.5 * (a.alpha + b.alpha), 0.5 * (a.beta + b.beta)};
    CHECK(eval_f(in.t, in.p, mid).first >= 0.5 * fa + 0.5 * eval_f(in.t, in.p, b).first - 1e-10);
  }
}

TEST_CASE("dp_step closed cases") {
  Rng rng(42);
  const Index n = 5;
  MatrixXd A = random_matrix(rng, 2, n);
  SparseQP p = build_problem(random_psd(rng, n, 3), random_vector(rng, n), A, VectorXd::Zero(2),
                             2, 1.0);
  const SpectralTruncation t = truncate(eig_sym(p.Q), 3);
  const DualPoint d{random_vector(rng, 3), random_vector(rng, 2).cwiseAbs()};
  const double kappa = 0.3;

  const DualPoint empty = dp_step(t, p, d, SupportVector(n), kappa);
  CHECK((empty.alpha - (1 - kappa / 2) * d.alpha).norm() < 1e-15);
  CHECK(empty.beta == d.beta);

  p.b = VectorXd::Constant(2, 0.7);
  const DualPoint clamp = dp_step(t, p, DualPoint{d.alpha, VectorXd::Zero(2)}, SupportVector(n), kappa);
  CHECK(clamp.beta.isZero());

  CHECK_THROWS_AS(dp_step(t, p, d, SupportVector(n), 0.0), InvalidProblem);
}

TEST_CASE("dp_step follows central differences of f") {
  Rng rng(43);
  int checked = 0;
  while (checked < 50) {
    const Index n = uniform_int(rng, 2, 10);
    const int s = uniform_int(rng, 1, static_cast<int>(std::min<Index>(n - 1, 3)));
    const Instance in = random_instance(rng, n, s, uniform_int(rng, 0, 2), uniform(rng, 0.3, 3.0));
    const Index k = in.t.k, m = in.p.m();
    const DualPoint d{random_vector(rng, k), (random_vector(rng, m).cwiseAbs().array() + 1.0).matrix()};
    if (selection_gap(gamma(in.t, in.p, d), s) < 1e-2) continue;
    ++checked;

    const double kappa = 1e-3, h = 1e-6;
    const SupportVector z = eval_f(in.t, in.p, d).second;
    const DualPoint next = dp_step(in.t, in.p, d, z, kappa);
    for (Index i = 0; i < k; ++i) {
      DualPoint plus = d, minus = d;
      plus.alpha(i) += h;
      minus.alpha(i) -= h;
      const double fd = (eval_f(in.t, in.p, plus).first - eval_f(in.t, in.p, minus).first) / (2 * h);
      const double step = (next.alpha(i) - d.alpha(i)) / kappa;
      CHECK(std::abs(step - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
    for (Index i = 0; i < m; ++i) {
      if (next.beta(i) == 0.0) continue;
      DualPoint plus = d, minus = d;
      plus.beta(i) += h;
      minus.beta(i) -= h;
      const double fd = (eval_f(in.t, in.p, plus).first - eval_f(in.t, in.p, minus).first) / (2 * h);
      const double step = (next.beta(i) - d.beta(i)) / kappa;
      CHECK(std::abs(step - fd) <= 1e-5 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("run_dual_program trace invariants and weak duality") {
  Rng rng(44);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = uniform_int(rng, 2, 8);
    const int s = uniform_int(rng, 1, static_cast<int>(std::min<Index>(n, 3)));
    const Index m = uniform_int(rng, 0, 1);
    const Instance in = random_instance(rng, n, s, m, uniform(rng, 0.5, 5.0));
    DPConfig cfg;
    cfg.max_iters = 300;
    cfg.step_a = 0.5;
    cfg.p_window = 20;
    const DPTrace trace = run_dual_program(in.t, in.p, DualPoint::zeros(in.t.k, m), cfg);
    const double jk = brute_force_level(in.p, in.t.reconstruct(), s).value;
    REQUIRE(trace.iterates.size() == 300);
    for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
      const DPIterate& it = trace.iterates[i];
      CHECK(it.f <= jk + 1e-9);
      CHECK((it.dual.beta.array() >= 0.0).all());
      CHECK(it.kappa == doctest::Approx(0.5 / std::sqrt(i + 1.0)));
      if (i > 0) CHECK(trace.best_f_history[i] >= trace.best_f_history[i - 1]);
    }
    CHECK(trace.best_f == trace.best_f_history.back());
  }
}

TEST_CASE("run_dual_program reaches J*_k on a dominant-support instance") {
  const Index n = 8;
  VectorXd diag(n), c(n);
  diag << 3.0, 2.5, 2.0, 1.5, 1.0, 0.8, 0.6, 0.4;
  c << -0.2, -6.0, 0.1, 5.0, -0.3, 0.2, -0.1, 0.05;
  const SparseQP p = build_problem(diag.asDiagonal().toDenseMatrix(), c, MatrixXd(0, n),
                                   VectorXd(0), 2, 1.0);
  const SpectralTruncation t = truncate(eig_sym(p.Q), 4);
  DPConfig cfg;
  cfg.max_iters = 3000;
  cfg.step_a = 1.0;
  const DPTrace trace = run_dual_program(t, p, DualPoint::zeros(4, 0), cfg);
  const double jk = brute_force_level(p, t.reconstruct(), 2).value;
  CHECK(trace.z_converged);
  CHECK(trace.iterates.back().z == SupportVector::from_indices(n, {1, 3}));
  CHECK(std::abs(trace.best_f - jk) <= 1e-4 * std::abs(jk));
  CHECK(screen_from_dp(trace, cfg.p_window).count() == 2);
}

TEST_CASE("run_dual_program on a scalar problem") {
  const double lambda = 1.5, c = -2.0, eta = 2.0;
  const SparseQP p = build_problem(MatrixXd::Constant(1, 1, lambda), VectorXd::Constant(1, c),
                                   MatrixXd(0, 1), VectorXd(0), 1, eta);
  const SpectralTruncation t = truncate(eig_sym(p.Q), 1);
  DPConfig cfg;
  cfg.max_iters = 4000;
  cfg.step_a = 1.0;
  const DPTrace trace = run_dual_program(t, p, DualPoint::zeros(1, 0), cfg);
  const double exact = -c * c / (4.0 * (lambda + 1.0 / eta));
  CHECK(trace.best_f == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("screen_from_dp unions the window") {
  DPTrace trace;
  const SupportVector a = SupportVector::from_indices(5, {0, 1});
  const SupportVector b = SupportVector::from_indices(5, {1, 4});
  for (int i = 0; i < 10; ++i) trace.iterates.push_back(DPIterate{{}, i < 8 ? a : b, 0.0, 0.0});
  CHECK(screen_from_dp(trace, 2) == b);
  CHECK(screen_from_dp(trace, 3) == (a | b));
  CHECK(screen_from_dp(trace, 100) == (a | b));
  CHECK_THROWS_AS(screen_from_dp(DPTrace{}, 2), InvalidProblem);
}

TEST_CASE("run_dual_program guards") {
  const SparseQP p = build_problem(MatrixXd::Identity(3, 3), VectorXd::Ones(3), MatrixXd(0, 3),
                                   VectorXd(0), 1, 1.0);
  const SpectralTruncation t = truncate(eig_sym(p.Q), 2);
  DPConfig huge;
  huge.step_a = 1e7;
  CHECK_THROWS_AS(run_dual_program(t, p, DualPoint{VectorXd::Ones(2), VectorXd(0)}, huge),
                  NumericalFailure);
  DPConfig bad;
  bad.step_a = 0.0;
  CHECK_THROWS_AS(run_dual_program(t, p, DualPoint::zeros(2, 0), bad), InvalidProblem);
  CHECK_THROWS_AS(run_dual_program(t, p, DualPoint::zeros(3, 0), DPConfig{}), InvalidProblem);
}

TEST_CASE("converged dual supports are level argmins with a conditioned step") {
  Rng rng(606);
  int converged = 0;
  for (int i = 0; i < 60; ++i) {
    const Index n = uniform_int(rng, 3, 8);
    const int s = uniform_int(rng, 1, static_cast<int>(std::min<Index>(n - 1, 3)));
    const SparseQP p = random_problem(rng, n, s, std::pow(10.0, uniform(rng, -3.0, 0.0)));
    const Spectrum sp = eig_sym(p.Q);
    const SpectralTruncation t = truncate(sp, uniform_int(rng, 1, static_cast<int>(n)));
    DPConfig cfg;
    cfg.max_iters = 20000;
    cfg.step_a = 1.0 / (1.0 + p.eta * sp.eigenvalues(0));
    const DPTrace trace = run_dual_program(t, p, DualPoint::zeros(t.k, 0), cfg);
    if (!trace.z_converged) continue;
    ++converged;
    const MatrixXd Qk = t.reconstruct();
    const double jk = brute_force_level(p, Qk, s).value;
    CHECK(oracle_restricted_constrained(p, Qk, trace.iterates.back().z.indices()) ==
          doctest::Approx(jk).epsilon(1e-9));
    CHECK(trace.best_f == doctest::Approx(jk).epsilon(1e-3));
  }
  CHECK(converged >= 20);
}
