#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envl0/solvers.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace envl0;

namespace {

Vector random_vector(Index n, std::mt19937_64 &rng, double s = 1.0) {
  std::normal_distribution<double> g(0.0, s);
  Vector v(n);
  for (auto &x : v)
    x = g(rng);
  return v;
}

// Band-limited test problem: smooth pulse, 20 of 32 rows observed.
struct Problem {
  MeasurementOperator K;
  Vector u;
  CVector r;
};

Problem make_problem() {
  const Index M = 32;
  FrameletSystem fs(M, 2);
  std::vector<Index> low;
  for (Index m = 2; m <= 11; ++m)
    low.push_back(m);
  MeasurementOperator K(FourierSpec(M), SamplingPlan::closure_of(M, low), fs);
  Vector u(M);
  for (Index n = 0; n < M; ++n) {
    double s = (double(n) - 12.0) / 3.0;
    u[n] = -s * std::exp(-s * s);
  }
  CVector r = K.apply(fs.analysis(u));
  return {K, u, r};
}

} // namespace

TEST_CASE("config validation") {
  SolverConfig ok(RegParams(0.01, 0.05));
  CHECK_NOTHROW(ok.validate());
  SolverConfig bad(RegParams(1.0, 1.0));
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.allow_inadmissible = true;
  CHECK_NOTHROW(bad.validate());
  bad.y_update = YUpdate::inner_loop;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  ok.tol = 0;
  CHECK_THROWS_AS(ok.validate(), DomainError);
}

TEST_CASE("zero data is a fixed point") {
  auto P = make_problem();
  SolverConfig cfg(RegParams(0.01, 0.05));
  auto res = el0m_solve(P.K, CVector::Zero(P.K.range_dim()), cfg);
  CHECK(res.trace.iterations == 1);
  CHECK(res.trace.converged);
  CHECK(res.x.norm() == 0.0);
  CHECK(res.y.norm() == 0.0);

  auto l1 = l1m_solve(P.K, CVector::Zero(P.K.range_dim()), 0.1);
  CHECK(l1.y.norm() == 0.0);
  CHECK(l1.trace.converged);
}

TEST_CASE("inner step") {
  auto P = make_problem();
  const Index N = P.K.domain_dim();
  std::mt19937_64 rng(2);
  Vector b = random_vector(N, rng);
  Vector null = b - P.K.gram(b);
  CVector r0 = CVector::Zero(P.K.range_dim());
  CHECK((el0m_inner_step(P.K, null, null, 0.5, r0) - null).norm() < 1e-12 * null.norm());
  CHECK_THROWS_AS(el0m_inner_step(P.K, b, b, 1.0, r0), DomainError);

  // v -> x - c K*(K v - r) contracts by c towards the normal-equation solution.
  const double c = 0.5;
  Vector x = random_vector(N, rng);
  Vector target = normal_solve(P.K, c, x + c * P.K.adjoint(P.r));
  Vector v = Vector::Zero(N);
  double err0 = target.norm();
  for (int j = 1; j <= 50; ++j) {
    v = el0m_inner_step(P.K, x, v, c, P.r);
    CHECK((v - target).norm() <= std::pow(c, j) * err0 * (1 + 1e-9) + 1e-13);
  }
  CHECK((v - target).norm() < 1e-9 * target.norm());
}

TEST_CASE("el0m recovers band-limited data and passes its audit") {
  auto P = make_problem();
  SolverConfig cfg(RegParams(1e-4, 1e-4 / 0.3));
  cfg.max_iter = 100000;
  auto res = el0m_solve(P.K, P.r, cfg);
  CHECK(res.trace.converged);
  auto a = audit_trace(res, cfg);
  CHECK(a.monotone);
  CHECK(a.jump_bound);
  CHECK(a.support_stable);
  CHECK(a.fixed_point);
  CHECK(a.ok());
  CHECK(res.trace.support_stable_from <= res.trace.iterations);
  CHECK((P.K.apply(res.y) - P.r).norm() < 1e-2 * P.r.norm());

  // Full sampling: every framelet-representable signal is consistent data.
  FrameletSystem fs(32, 2);
  MeasurementOperator Kf(FourierSpec(32), SamplingPlan::full(32), fs);
  CVector rf = Kf.apply(fs.analysis(P.u));
  auto full = el0m_solve(Kf, rf, cfg);
  CHECK(full.trace.converged);
  CHECK((Kf.apply(full.y) - rf).norm() < 1e-2 * rf.norm());
}

TEST_CASE("closed form and inner loop agree") {
  auto P = make_problem();
  SolverConfig cfg(RegParams(1e-4, 1e-4 / 0.3));
  cfg.max_iter = 100000;
  auto a = el0m_solve(P.K, P.r, cfg);
  cfg.y_update = YUpdate::inner_loop;
  auto b = el0m_solve(P.K, P.r, cfg);
  CHECK(a.trace.converged);
  CHECK(b.trace.converged);
  CHECK((a.y - b.y).norm() <= 1e-6 * std::max(1.0, a.y.norm()));
}

TEST_CASE("trace csv") {
  auto P = make_problem();
  SolverConfig cfg(RegParams(1e-3, 1e-2));
  cfg.max_iter = 3;
  auto res = el0m_solve(P.K, P.r, cfg);
  std::ostringstream os;
  write_trace_csv(os, res.trace);
  std::string s = os.str();
  CHECK(s.rfind("iter,F,Q,G,support_size,rel_change,fp_residual\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 1 + res.trace.iterations);
}

TEST_CASE("inconsistent data is rejected") {
  auto P = make_problem();
  CVector r = P.r;
  r[0] += Complex(0, 1);
  SolverConfig cfg(RegParams(1e-3, 1e-2));
  CHECK_THROWS_AS(el0m_solve(P.K, r, cfg), DomainError);
  CHECK_THROWS_AS(l1m_solve(P.K, r, 0.1), DomainError);
  CHECK_THROWS_AS(l1m_solve(P.K, P.r, 0.0), DomainError);
}

TEST_CASE("l1m fixed point") {
  auto P = make_problem();
  for (double g : {1e-3, 1e-2, 1e-1}) {
    auto res = l1m_solve(P.K, P.r, g, 1e-9, 50000);
    CHECK(res.trace.converged);
    CHECK(res.trace.fp_residual <= 1e-4 * std::max(1.0, res.y.norm()));
    // The minimizer beats the zero start.
    double f = 0.5 * (P.K.apply(res.y) - P.r).squaredNorm() + g * res.y.lpNorm<1>();
    CHECK(f <= 0.5 * P.r.squaredNorm());
  }
}

TEST_CASE("reconstruct_signal") {
  FrameletSystem fs(16, 2);
  std::mt19937_64 rng(6);
  Vector v = random_vector(16, rng);
  double lambda = 2.0 / 129.0;
  CHECK((reconstruct_signal(fs, lambda * fs.analysis(v), lambda) - v).norm() < 1e-12 * v.norm());
  CHECK(reconstruct_signal(fs, Vector::Zero(80), lambda).norm() == 0.0);
  CHECK_THROWS_AS(reconstruct_signal(fs, Vector::Zero(80), 0.0), DomainError);
}
