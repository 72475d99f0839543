#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "envl0/seismic.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace envl0;

namespace {

const double kPi = std::numbers::pi;

long double ricker_ld(long double t, long double f0) {
  const long double pi = 3.14159265358979323846264338327950288L;
  long double a = pi * pi * f0 * f0 * t * t;
  return (1.0L - 2.0L * a) * std::exp(-a);
}

// Large-argument expansion of H0^(2), two terms.
Complex hankel2_asymptotic(double x) {
  Complex phase = std::polar(1.0, -(x - kPi / 4));
  return std::sqrt(2.0 / (kPi * x)) * phase * (1.0 + Complex(0, 1) / (8.0 * x));
}

} // namespace

TEST_CASE("time grid") {
  TimeGrid g(2.0, 129);
  CHECK(g.lambda() == doctest::Approx(2.0 / 129));
  CHECK(g.delta_f() == doctest::Approx(0.5));
  CHECK(g.frequency(3) == doctest::Approx(1.0));
  CHECK(g.time(129) == doctest::Approx(2.0));
  CHECK_THROWS_AS(TimeGrid(0.0, 10), DomainError);
  CHECK_THROWS_AS(TimeGrid(1.0, 1), DomainError);
}

TEST_CASE("ricker") {
  CHECK(ricker(0.0, 25.0) == 1.0);
  for (double f0 : {10.0, 25.0}) {
    double z = 1.0 / (std::sqrt(2.0) * kPi * f0);
    CHECK(std::abs(ricker(z, f0)) < 1e-14);
    CHECK(std::abs(ricker(-z, f0)) < 1e-14);
  }
  CHECK(ricker(0.02, 25.0) == doctest::Approx(double(ricker_ld(0.02L, 25.0L))).epsilon(1e-14));
  CHECK_THROWS_AS(validate(SourceWavelet{Ricker{0.0}}), DomainError);
}

TEST_CASE("gaussian derivative and its transform") {
  CHECK(gaussian_deriv(1.0, 1.0, 200.0) == 0.0);
  for (double d : {0.01, 0.05, 0.1})
    CHECK(gaussian_deriv(1.0 + d, 1.0, 200.0) == doctest::Approx(-gaussian_deriv(1.0 - d, 1.0, 200.0)));
  CHECK(std::abs(gaussian_deriv_ft(0.0, 1.0, 200.0)) == 0.0);

  // Rectangle rule on the record against the closed form, and the same rule
  // on a 10x finer grid to show the residual is discretization error.
  TimeGrid g(2.0, 129), fine(2.0, 1290);
  Vector u = sample_periodic(GaussianDeriv{1.0, 200.0}, g);
  Vector uf = sample_periodic(GaussianDeriv{1.0, 200.0}, fine);
  Complex exact = gaussian_deriv_ft(3.0, 1.0, 200.0);
  double err = std::abs(quadrature_ft(u, g, 3.0) - exact) / std::abs(exact);
  double err_fine = std::abs(quadrature_ft(uf, fine, 3.0) - exact) / std::abs(exact);
  CHECK(err <= 1e-3);
  CHECK(err_fine <= err + 1e-12);
}

TEST_CASE("quadrature transform") {
  TimeGrid g(1.0, 4);
  Vector e(4);
  e << 1, 0, 0, 0;
  CHECK(std::abs(quadrature_ft(e, g, 1.0) - 0.25) < 1e-15);
  TimeGrid g2(2.0, 10);
  CHECK(std::abs(quadrature_ft(Vector::Constant(10, 3.0), g2, 0.0) - 6.0) < 1e-14);

  // At grid frequencies the rule equals lambda sqrt(M) F u.
  TimeGrid gg(2.0, 129);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  Vector u(129);
  for (auto &x : u)
    x = n(rng);
  CVector Fu = dft_apply(FourierSpec(129), u.cast<Complex>());
  double worst = 0;
  for (Index m = 1; m <= 129; ++m)
    worst = std::max(worst, std::abs(quadrature_ft(u, gg, gg.frequency(m)) - gg.lambda() * std::sqrt(129.0) * Fu[m - 1]));
  CHECK(worst < 1e-10 * Fu.norm());
}

TEST_CASE("green functions") {
  CHECK(std::abs(green_3d(0.3, 2.0)) == doctest::Approx(1.0 / (8 * kPi)));
  CHECK(std::arg(green_3d(0.1, 2.0)) == doctest::Approx(-0.2));
  for (double x : {50.0, 200.0}) {
    Complex expect = Complex(0, -0.25) * hankel2_asymptotic(x);
    CHECK(std::abs(green_2d(1.0, x) - expect) < 1e-4 * std::abs(expect));
  }
  CHECK_THROWS_AS(green_2d(1.0, 0.0), DomainError);
}

TEST_CASE("periodic sampling") {
  TimeGrid g(1.344, 168);
  Vector u = sample_periodic(Ricker{25.0}, g);
  CHECK(u[0] == doctest::Approx(1.0));
  // A wavelet centred at t = 0 wraps to the end of the record.
  CHECK(u[167] == doctest::Approx(ricker(-g.lambda(), 25.0)));
  Vector d = sample_periodic(Ricker{25.0}, g, 10 * g.lambda());
  Index peak;
  d.maxCoeff(&peak);
  CHECK(peak == 10);
}

TEST_CASE("d'alembert seismogram") {
  TimeGrid g(1.344, 168);
  auto near = dalembert_seismogram(1500, Ricker{25.0}, {500, 1000}, {1500, 1000}, g);
  auto far = dalembert_seismogram(1500, Ricker{25.0}, {500, 1000}, {500, 3000}, g);
  Index p1, p2;
  near.samples.maxCoeff(&p1);
  far.samples.maxCoeff(&p2);
  CHECK(std::abs(g.time(p1) - 1000.0 / 1500.0) <= g.lambda());
  CHECK(near.samples.maxCoeff() / far.samples.maxCoeff() == doctest::Approx(2.0).epsilon(0.05));
  CHECK_THROWS_AS(dalembert_seismogram(1500, Ricker{25.0}, {0, 0}, {0, 0}, g), DomainError);
}

TEST_CASE("velocity model") {
  auto m = VelocityModel::three_layer(11, 21, 100, 600, 1300, 2000, 2500, 4000);
  CHECK(m.velocity()(5, 3) == 2000);
  CHECK(m.velocity()(7, 3) == 2500);
  CHECK(m.velocity()(12, 10) == 2500);
  CHECK(m.velocity()(13, 0) == 4000);
  CHECK(m.min_velocity() == 2000);
  CHECK(m.node(240, 460) == std::pair<Index, Index>{5, 2});
  CHECK_THROWS_AS(m.node(-100, 0), DomainError);
  CHECK_THROWS_AS(VelocityModel(3, 3, 1.0, Eigen::MatrixXd::Zero(3, 3)), DomainError);
}

TEST_CASE("assemble measurements") {
  TimeGrid g(2.0, 129);
  auto plan = build_band_plan(129, 2.0, 0.5, 7.5);
  ReceiverSpectrum zero;
  for (Index m : plan.low_half_rows())
    zero[m] = 0.0;
  CHECK(assemble_measurements(zero, plan, g).norm() == 0.0);

  auto full = SamplingPlan::full(129);
  Vector u = sample_periodic(GaussianDeriv{1.0, 200.0}, g);
  ReceiverSpectrum sp;
  for (Index m : full.low_half_rows())
    sp[m] = quadrature_ft(u, g, g.frequency(m));
  CVector r = assemble_measurements(sp, full, g);
  CHECK(hermitian_defect(full, r) == 0.0);
  FrameletSystem fs(129, 3);
  MeasurementOperator K(FourierSpec(129), full, fs);
  CHECK((g.lambda() * K.apply(fs.analysis(u)) - r).norm() <= 1e-10 * r.norm());

  // Full band: IDFT inverts exactly; zero data gives zero for every method.
  auto rec = reconstruct(r, full, g, fs, IdftMethod{});
  CHECK((rec.samples - u).norm() <= 1e-10 * u.norm());
  CVector r0 = CVector::Zero(plan.size());
  SolverConfig cfg(RegParams(1e-3, 1e-2));
  for (Method m : {Method{IdftMethod{}}, Method{L1mMethod{1e-2}}, Method{El0mMethod{cfg}}})
    CHECK(reconstruct(r0, plan, g, fs, m).samples.norm() == 0.0);
  CHECK(reconstruct(r0, plan, g, fs, El0mMethod{cfg}, {DataScale::peak, 1.0}).samples.norm() == 0.0);
  sp.erase(2);
  CHECK_THROWS_AS(assemble_measurements(sp, full, g), DomainError);
}

TEST_CASE("scale policies undo themselves") {
  TimeGrid g(2.0, 129);
  auto plan = build_band_plan(129, 2.0, 0.5, 7.5);
  FrameletSystem fs(129, 3);
  ReceiverSpectrum sp;
  for (Index m : plan.low_half_rows())
    sp[m] = gaussian_deriv_ft(g.frequency(m), 1.0, 200.0);
  CVector r = assemble_measurements(sp, plan, g);
  // One L1M step from zero with a negligible weight is K* r, whose synthesis is
  // the IDFT whatever scale the solver saw.
  Vector idft = reconstruct(r, plan, g, fs, IdftMethod{}).samples;
  for (ScalePolicy s : {ScalePolicy{DataScale::lambda, 1.0}, ScalePolicy{DataScale::samples, 1.0},
                        ScalePolicy{DataScale::peak, 1.0}}) {
    auto rec = reconstruct(r, plan, g, fs, L1mMethod{1e-14, 1e-6, 1}, s);
    CHECK((rec.samples - idft).norm() < 1e-9 * idft.norm());
  }
}

TEST_CASE("first arrival") {
  Vector t = Vector::Zero(10);
  CHECK(first_arrival(t) == -1);
  t[4] = 0.05;
  t[6] = -1.0;
  CHECK(first_arrival(t) == 6);
  CHECK(first_arrival(t, 0.01) == 4);
  CHECK(first_peak(t, 0.01) == 4);
  CHECK(first_peak(Vector::Zero(3)) == -1);
  t[7] = 2.0;
  CHECK(first_peak(t) == 7);
}

TEST_CASE("helmholtz basics") {
  auto m = VelocityModel::three_layer(41, 41, 10, 150, 300, 1500, 2000, 2500);
  HelmholtzSolver solver(m, PmlSettings{10});
  CHECK(solver.resolution(10.0) == doctest::Approx(2 * kPi * 10 * 10 / 1500.0));
  CHECK_THROWS_AS(solver.factorize(30.0), DomainError);
  CHECK_NOTHROW(solver.factorize(30.0, true));
  solver.factorize(12.0);

  auto zero = solver.solve({{{20, 20}, Complex(0.0)}});
  CHECK(zero.values.norm() == 0.0);
  CHECK(zero.interior().rows() == 41);
  CHECK(zero.interior().cols() == 41);

  auto a = solver.solve({{{20, 20}, Complex(1.0, 0.5)}});
  auto b = solver.solve({{{20, 20}, Complex(2.0, 1.0)}});
  CHECK((b.values - 2.0 * a.values).norm() <= 1e-12 * b.values.norm());
  CHECK(a.relative_residual <= 1e-8);

  // Complex-symmetric operator: source and receiver may be swapped (same
  // layer, so both sources carry the same gain).
  auto p = solver.solve({{{5, 8}, Complex(1.0)}});
  auto q = solver.solve({{{12, 30}, Complex(1.0)}});
  CHECK(std::abs(p.at(12, 30) - q.at(5, 8)) <= 1e-10 * std::abs(p.at(12, 30)));
  CHECK_THROWS_AS(solver.solve({{{41, 0}, Complex(1.0)}}), DomainError);
}

TEST_CASE("helmholtz against the free-space green's function") {
  auto m = VelocityModel::homogeneous(201, 201, 10, 1500);
  HelmholtzProblem prob{m, 10.0, 1000, 1000};
  auto field = helmholtz_solve(prob);
  auto cmp = compare_with_green(field, prob);
  CHECK(cmp.receivers > 100);
  CHECK(cmp.max_magnitude_error <= 0.10);
  CHECK(cmp.max_phase_error <= 0.10);

  // Absorbing layer: at the edge of the physical region the field departs from
  // the free-space solution by at most 1% of the field one wavelength out.
  double kappa = 2 * kPi * 10.0 / 1500.0;
  double ref = std::abs(green_2d(kappa, 150.0));
  double worst = 0;
  for (Index k = 0; k < 201; k += 5) {
    for (auto [i, j] : {std::pair<Index, Index>{0, k}, {200, k}, {k, 0}, {k, 200}}) {
      double r = std::hypot(double(i - 100) * 10, double(j - 100) * 10);
      worst = std::max(worst, std::abs(field.at(i, j) - green_2d(kappa, r)) / ref);
    }
  }
  MESSAGE("boundary deviation / field at one wavelength: " << worst);
  CHECK(worst <= 1e-2);
}
