#include "selftest.h"

#include "envl0/regularization.h"

#include <Eigen/Dense>
#include <cmath>
#include <ostream>
#include <random>

namespace envl0::cli {

namespace {

void check(SuiteResult &res, std::ostream &log, bool ok, const std::string &what) {
  ++res.total;
  if (ok)
    ++res.passed;
  else
    log << "  FAILED " << what << '\n';
}

Eigen::MatrixXd dense_gram(const MeasurementOperator &op) {
  const Index N = op.domain_dim();
  Eigen::MatrixXd G(N, N);
  for (Index j = 0; j < N; ++j)
    G.col(j) = op.gram(Vector::Unit(N, j));
  return G;
}

} // namespace

SuiteResult operator_suite(const FilterBank &filters, std::ostream &log) {
  SuiteResult res;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  auto randn = [&](Index n) { return Vector(Vector::NullaryExpr(n, [&](Index) { return normal(rng); })); };

  for (Index M : {8, 32, 129}) {
    const std::string tag = " (M=" + std::to_string(M) + ")";
    FourierSpec spec(M);
    CVector z = randn(M).cast<Complex>() + Complex(0, 1) * randn(M).cast<Complex>();
    check(res, log, (dft_adjoint(spec, dft_apply(spec, z)) - z).norm() <= 1e-12 * z.norm(), "F*F = I" + tag);

    for (int L : {1, 2}) {
      FrameletSystem fr(M, L, filters);
      Vector v = randn(M);
      Vector y = randn(fr.coefficient_length());
      check(res, log, (fr.synthesis(fr.analysis(v)) - v).norm() <= 1e-12 * v.norm(), "W*W = I" + tag);
      double lhs = fr.analysis(v).dot(y), rhs = v.dot(fr.synthesis(y));
      check(res, log, std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)), "<Wv,y> = <v,W*y>" + tag);
    }

    std::vector<Index> rows;
    for (Index m = 2; 2 * (m - 1) <= M && m <= 2 + M / 4; ++m)
      rows.push_back(m);
    MeasurementOperator op(spec, SamplingPlan::closure_of(M, rows), FrameletSystem(M, 2, filters));
    const Index d = op.range_dim(), N = op.domain_dim();
    CVector w(d);
    for (Index i = 0; i < d; ++i) {
      Index j = op.plan().position(op.plan().conjugate_row(op.plan().rows()[static_cast<size_t>(i)]));
      if (j >= i)
        w[i] = Complex(normal(rng), j == i ? 0.0 : normal(rng));
      else
        w[i] = std::conj(w[j]);
    }
    check(res, log, (op.apply(op.adjoint(w)) - w).norm() <= 1e-10 * w.norm(), "KK* = I" + tag);

    Vector b = randn(N);
    Vector Pb = op.gram(b);
    check(res, log, (op.gram(Pb) - Pb).norm() <= 1e-10 * b.norm(), "K*K idempotent" + tag);

    if (N <= 400) {
      Eigen::MatrixXd G = dense_gram(op);
      check(res, log, (G - G.transpose()).norm() <= 1e-10 * std::max(1.0, G.norm()), "K*K symmetric" + tag);
      const double c = 0.37;
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(N, N) + c * G;
      Vector x_dense = A.ldlt().solve(b);
      check(res, log, (normal_solve(op, c, b) - x_dense).norm() <= 1e-9 * x_dense.norm(),
            "normal_solve vs dense" + tag);
    }
  }
  return res;
}

SuiteResult prox_suite(std::ostream &log) {
  SuiteResult res;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> uni(-3.0, 3.0), beta_dist(0.01, 2.0);
  int prox_bad = 0, soft_bad = 0, env_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    double y = uni(rng), beta = beta_dist(rng), tau = std::abs(uni(rng)) / 2;
    // Minimizers of the scalar models over a fine grid plus the candidates.
    auto l0_obj = [&](double x) { return (x != 0.0 ? 1.0 : 0.0) + (x - y) * (x - y) / (2 * beta); };
    double best = 0.0;
    for (double x : {0.0, y})
      if (l0_obj(x) < l0_obj(best))
        best = x;
    double p = prox_l0_scalar(y, beta);
    if (std::abs(l0_obj(p) - l0_obj(best)) > 1e-12)
      ++prox_bad;

    auto l1_obj = [&](double x) { return tau * std::abs(x) + 0.5 * (x - y) * (x - y); };
    double s = soft_threshold(Vector::Constant(1, y), tau)[0];
    double grid_best = l1_obj(0.0);
    for (int i = -6000; i <= 6000; ++i)
      grid_best = std::min(grid_best, l1_obj(i * 5e-4));
    if (l1_obj(s) > grid_best + 1e-9)
      ++soft_bad;

    auto env_obj = [&](double x) { return (x != 0.0 ? 1.0 : 0.0) + (x - y) * (x - y) / (2 * beta); };
    double env_brute = std::min(env_obj(0.0), env_obj(y));
    for (int i = -6000; i <= 6000; ++i)
      env_brute = std::min(env_brute, env_obj(i * 5e-4));
    if (std::abs(env_l0(Vector::Constant(1, y), beta) - env_brute) > 1e-6)
      ++env_bad;
  }
  check(res, log, prox_bad == 0, "prox_l0 vs brute force (" + std::to_string(prox_bad) + " mismatches)");
  check(res, log, soft_bad == 0, "soft_threshold vs grid (" + std::to_string(soft_bad) + " mismatches)");
  check(res, log, env_bad == 0, "env_l0 vs grid (" + std::to_string(env_bad) + " mismatches)");
  check(res, log, prox_l0_scalar(std::sqrt(2 * 0.5), 0.5) == 0.0, "prox_l0 tie maps to zero");
  return res;
}

} // namespace envl0::cli
