#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envl0/operators.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

using namespace envl0;

namespace {

const double kPi = std::numbers::pi;

Eigen::MatrixXcd dense_dft(Index M) {
  Eigen::MatrixXcd F(M, M);
  for (Index m = 0; m < M; ++m)
    for (Index n = 0; n < M; ++n)
      F(m, n) = std::polar(1.0 / std::sqrt(double(M)), -2.0 * kPi * double(m * n) / double(M));
  return F;
}

// W assembled entry by entry from the filter definition, one block per band.
Eigen::MatrixXd dense_framelet(Index M, int L) {
  auto f = piecewise_linear_filters();
  auto circ = [&](const std::array<double, 3> &a, Index s) {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(M, M);
    for (Index n = 0; n < M; ++n)
      for (int k = 0; k < 3; ++k)
        C(n, ((n + (k - 1) * s) % M + M) % M) += a[k];
    return C;
  };
  Eigen::MatrixXd W((2 * L + 1) * M, M);
  Eigen::MatrixXd low = Eigen::MatrixXd::Identity(M, M);
  for (int l = 1; l <= L; ++l) {
    Index s = Index(1) << (l - 1);
    W.block((2 * l - 1) * M, 0, M, M) = circ(f[1], s) * low;
    W.block(2 * l * M, 0, M, M) = circ(f[2], s) * low;
    low = circ(f[0], s) * low;
  }
  W.topRows(M) = low;
  return W;
}

Vector random_vector(Index n, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (auto &x : v)
    x = g(rng);
  return v;
}

CVector hermitian_data(const SamplingPlan &plan, std::mt19937_64 &rng) {
  std::normal_distribution<double> g;
  CVector w(plan.size());
  for (Index m : plan.low_half_rows()) {
    Complex z = plan.is_self_conjugate(m) ? Complex(g(rng), 0) : Complex(g(rng), g(rng));
    w[plan.position(m)] = z;
    w[plan.position(plan.conjugate_row(m))] = std::conj(z);
  }
  return w;
}

} // namespace

TEST_CASE("dft small cases") {
  CVector one(1);
  one << 5.0;
  CHECK(std::abs(dft_apply(FourierSpec(1), one)[0] - 5.0) < 1e-15);

  FourierSpec s4(4);
  CVector e1 = CVector::Zero(4);
  e1[0] = 1.0;
  CVector a = dft_apply(s4, e1);
  for (Index i = 0; i < 4; ++i)
    CHECK(std::abs(a[i] - 0.5) < 1e-15);

  CVector ones = CVector::Ones(4);
  CVector b = dft_apply(s4, ones);
  CVector oracle = dense_dft(4) * ones;
  CHECK((b - oracle).norm() < 1e-14);
  CHECK(std::abs(b[0] - 2.0) < 1e-14);

  CVector z = CVector::Zero(4);
  z[0] = 2.0;
  CVector c = dft_adjoint(s4, z);
  CHECK((c - CVector::Ones(4)).norm() < 1e-14);
}

TEST_CASE("dft matches dense matrix and round-trips") {
  std::mt19937_64 rng(7);
  for (Index M : {7, 8, 129}) {
    FourierSpec spec(M);
    CVector v = random_vector(M, rng).cast<Complex>() + Complex(0, 1) * random_vector(M, rng).cast<Complex>();
    Eigen::MatrixXcd F = dense_dft(M);
    CHECK((dft_apply(spec, v) - F * v).norm() < 1e-12 * v.norm());
    CHECK((dft_adjoint(spec, v) - F.adjoint() * v).norm() < 1e-12 * v.norm());
    CHECK((dft_adjoint(spec, dft_apply(spec, v)) - v).norm() < 1e-12 * v.norm());
  }
  CHECK_THROWS_AS(dft_apply(FourierSpec(4), CVector::Zero(3)), DimensionError);
  CHECK_THROWS_AS(FourierSpec(0), DomainError);
}

TEST_CASE("sampling plan construction") {
  auto plan = build_band_plan(129, 2.0, 0.5, 15.0);
  CHECK(plan.size() == 60);
  CHECK(plan.rows().front() == 2);
  CHECK(plan.rows()[29] == 31);
  CHECK(plan.rows()[30] == 100);
  CHECK(plan.rows().back() == 129);

  auto p8 = build_band_plan(8, 1.0, 1.0, 1.0);
  CHECK(p8.rows() == std::vector<Index>{2, 8});
  CHECK(p8.conjugate_row(2) == 8);
  CHECK(*p8.frequency(2) == doctest::Approx(1.0));
  auto bare = SamplingPlan::from_rows(8, {2, 8});
  CHECK_FALSE(bare.frequency(2).has_value());
  CHECK(*bare.with_record_length(0.5).frequency(2) == doctest::Approx(2.0));
  CHECK_FALSE(bare.with_record_length(0.5).frequency(8).has_value());

  // DC needs no partner; an unpaired row is rejected.
  auto dc = SamplingPlan::from_rows(8, {1});
  CHECK(dc.is_self_conjugate(1));
  CHECK_THROWS_AS(SamplingPlan::from_rows(8, {2}), DomainError);
  CHECK_THROWS_AS(SamplingPlan::from_rows(8, {2, 2, 8}), DomainError);
  CHECK_THROWS_AS(SamplingPlan::from_rows(8, {9}), DomainError);
  CHECK(SamplingPlan::closure_of(8, {3}).rows() == std::vector<Index>{3, 7});
  // Nyquist row of an even length pairs with itself.
  CHECK(SamplingPlan::from_rows(8, {5}).is_self_conjugate(5));
  CHECK_THROWS_AS(build_band_plan(8, 1.0, 0.0, 2.0), DomainError);
  CHECK_THROWS_AS(build_band_plan(129, 2.0, 0.5, 0.75), DomainError);
  CHECK(build_band_plan(129, 2.0, 0.6, 1.4, BandSnap::inside).rows() == std::vector<Index>{3, 128});
}

TEST_CASE("random plan") {
  auto band = build_band_plan(129, 2.0, 0.5, 15.0);
  auto candidates = band.low_half_rows();
  REQUIRE(candidates.size() == 30);
  auto half = build_random_plan(129, candidates, 0.5, 11);
  CHECK(half.size() == 30);
  CHECK(half.low_half_rows().size() == 15);
  CHECK(build_random_plan(129, candidates, 0.5, 11) == half);
  CHECK(build_random_plan(129, candidates, 1.0, 3) == SamplingPlan::closure_of(129, candidates));
  for (Index m : half.low_half_rows())
    CHECK(std::find(candidates.begin(), candidates.end(), m) != candidates.end());
  // 0.25 * 30 = 7.5 rounds up.
  CHECK(build_random_plan(129, candidates, 0.25, 1).low_half_rows().size() == 8);
}

TEST_CASE("select and its adjoint") {
  auto plan = SamplingPlan::from_rows(4, {2, 4});
  CVector z(4);
  z << 1.0, Complex(2, 1), 3.0, Complex(4, -1);
  CVector s = select(plan, z);
  CHECK(s.size() == 2);
  CHECK(s[0] == Complex(2, 1));
  CHECK(s[1] == Complex(4, -1));

  auto p3 = SamplingPlan::from_rows(3, {1});
  CVector w(1);
  w << 5.0;
  CVector up = select_adjoint(p3, w);
  CHECK(up.size() == 3);
  CHECK(up[0] == Complex(5.0));
  CHECK(up[1] == Complex(0.0));
  CHECK((select(plan, select_adjoint(plan, s)) - s).norm() == 0.0);

  auto full = SamplingPlan::full(4);
  CHECK((select(full, z) - z).norm() == 0.0);
}

TEST_CASE("framelet against dense assembly") {
  FrameletSystem sys(4, 1);
  Vector e1 = Vector::Zero(4);
  e1[0] = 1.0;
  Eigen::MatrixXd W = dense_framelet(4, 1);
  CHECK((sys.analysis(e1) - W.col(0)).norm() < 1e-15);

  std::mt19937_64 rng(3);
  for (Index M : {8, 32, 129})
    for (int L : {1, 2, 3}) {
      FrameletSystem fs(M, L);
      Eigen::MatrixXd D = dense_framelet(M, L);
      CHECK((D.transpose() * D - Eigen::MatrixXd::Identity(M, M)).norm() < 1e-12);
      Vector v = random_vector(M, rng);
      Vector y = random_vector(fs.coefficient_length(), rng);
      CHECK((fs.analysis(v) - D * v).norm() < 1e-12 * v.norm());
      CHECK((fs.synthesis(y) - D.transpose() * y).norm() < 1e-12 * y.norm());
      CHECK((fs.synthesis(fs.analysis(v)) - v).norm() < 1e-12 * v.norm());
      CHECK(std::abs(fs.analysis(v).squaredNorm() - v.squaredNorm()) < 1e-12 * v.squaredNorm());
      double lhs = fs.analysis(v).dot(y), rhs = v.dot(fs.synthesis(y));
      CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs) + 1e-12);
    }
}

TEST_CASE("framelet constant input") {
  FrameletSystem sys(16, 1);
  Vector c = Vector::Constant(16, 2.5);
  Vector y = sys.analysis(c);
  CHECK((y.head(16) - c).norm() < 1e-14);
  CHECK(y.tail(32).norm() < 1e-14);
  CHECK(sys.synthesis(Vector::Zero(48)).norm() == 0.0);
}

TEST_CASE("measurement operator identities") {
  std::mt19937_64 rng(5);
  for (Index M : {8, 32, 129}) {
    FrameletSystem fs(M, 2);
    auto plan = SamplingPlan::closure_of(M, {2, 3, M / 3});
    MeasurementOperator K(FourierSpec(M), plan, fs);
    CHECK(K.domain_dim() == 5 * M);
    CHECK(K.range_dim() == plan.size());

    CVector w = hermitian_data(plan, rng);
    CHECK(hermitian_defect(plan, w) < 1e-15);
    CHECK((K.apply(K.adjoint(w, true)) - w).norm() < 1e-10 * w.norm());

    Vector y = random_vector(K.domain_dim(), rng);
    double lhs = (K.apply(y).adjoint() * w)(0).real();
    double rhs = y.dot(K.adjoint(w));
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(lhs) + 1e-12);

    Vector P = K.gram(y);
    CHECK((K.gram(P) - P).norm() < 1e-10 * y.norm());
    CHECK(K.apply(Vector::Zero(K.domain_dim())).norm() == 0.0);
    CHECK(K.adjoint(CVector::Zero(K.range_dim())).norm() == 0.0);
  }
}

TEST_CASE("measurement operator dense oracle, M=8") {
  FrameletSystem fs(8, 1);
  auto plan = SamplingPlan::from_rows(8, {2, 8});
  MeasurementOperator K(FourierSpec(8), plan, fs);
  Eigen::MatrixXd W = dense_framelet(8, 1);
  Eigen::MatrixXcd F = dense_dft(8);
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(2, 8);
  R(0, 1) = 1.0;
  R(1, 7) = 1.0;
  Eigen::MatrixXcd D = R * F * W.transpose().cast<Complex>();
  Vector e3 = Vector::Zero(8);
  e3[2] = 1.0;
  Vector y = fs.analysis(e3);
  CHECK((K.apply(y) - D * y.cast<Complex>()).norm() < 1e-14);

  // Full sampling: ||K W v|| = ||v||.
  MeasurementOperator Kf(FourierSpec(8), SamplingPlan::full(8), fs);
  std::mt19937_64 rng(1);
  Vector v = random_vector(8, rng);
  CHECK(std::abs(Kf.apply(fs.analysis(v)).norm() - v.norm()) < 1e-13);
}

TEST_CASE("normal_solve") {
  std::mt19937_64 rng(9);
  FrameletSystem fs(8, 1);
  auto plan = SamplingPlan::from_rows(8, {2, 8});
  MeasurementOperator K(FourierSpec(8), plan, fs);
  const Index N = K.domain_dim();
  Eigen::MatrixXd G(N, N);
  for (Index j = 0; j < N; ++j)
    G.col(j) = K.gram(Vector::Unit(N, j));
  Vector b = random_vector(N, rng);
  for (double c : {0.5, 2.0}) {
    Vector dense = (Eigen::MatrixXd::Identity(N, N) + c * G).lu().solve(b);
    CHECK((normal_solve(K, c, b) - dense).norm() < 1e-12 * b.norm());
  }
  CHECK((normal_solve(K, 1e-300, b) - b).norm() < 1e-14 * b.norm());
  Vector null = b - K.gram(b);
  CHECK((normal_solve(K, 3.0, null) - null).norm() < 1e-12 * b.norm());
  CHECK_THROWS_AS(normal_solve(K, -1.0, b), DomainError);
}

TEST_CASE("checked adjoint rejects inconsistent data") {
  FrameletSystem fs(8, 1);
  auto plan = SamplingPlan::from_rows(8, {2, 8});
  MeasurementOperator K(FourierSpec(8), plan, fs);
  CVector w(2);
  w << Complex(1, 1), Complex(1, 1);
  CHECK(hermitian_defect(plan, w) == doctest::Approx(2.0));
  CHECK_THROWS_AS(K.adjoint(w, true), NumericalError);
}
