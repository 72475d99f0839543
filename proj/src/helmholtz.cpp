#include "envl0/seismic.h"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace envl0 {

using SparseC = Eigen::SparseMatrix<Complex>;

struct HelmholtzSolver::Impl {
  SparseC A;
  Eigen::UmfPackLU<SparseC> lu;
  Index nx_t = 0, nz_t = 0;
  double frequency = 0;
};

HelmholtzSolver::HelmholtzSolver(VelocityModel model, PmlSettings pml)
    : model_(std::move(model)), pml_(pml), impl_(std::make_unique<Impl>()) {
  if (pml_.width < 1)
    throw DomainError("HelmholtzSolver: PML width must be at least one cell");
  if (!(pml_.strength > 0))
    throw DomainError("HelmholtzSolver: PML strength must be positive");
}

HelmholtzSolver::~HelmholtzSolver() = default;
HelmholtzSolver::HelmholtzSolver(HelmholtzSolver &&) noexcept = default;
HelmholtzSolver &HelmholtzSolver::operator=(HelmholtzSolver &&) noexcept = default;

double HelmholtzSolver::resolution(double frequency) const {
  return 2.0 * std::numbers::pi * frequency * model_.h() / model_.min_velocity();
}

void HelmholtzSolver::factorize(double frequency, bool allow_coarse) {
  if (!(frequency > 0))
    throw DomainError("helmholtz: frequency must be positive");
  double kh = resolution(frequency);
  if (kh > 1.0 && !allow_coarse)
    throw DomainError("helmholtz: kappa h = " + std::to_string(kh) + " exceeds 1 (under-resolved grid)");

  const Index P = pml_.width;
  const Index nx = model_.nx(), nz = model_.nz();
  const Index nx_t = nx + 2 * P, nz_t = nz + 2 * P;
  const double h = model_.h();
  const double omega = 2.0 * std::numbers::pi * frequency;
  const double Lp = static_cast<double>(P) * h;
  const Complex I(0.0, 1.0);
  // One profile for the whole layer keeps the operator complex symmetric.
  const double v_pml = model_.velocity().maxCoeff();

  auto vel = [&](Index i, Index j) {
    Index ii = std::clamp<Index>(i - P, 0, nz - 1);
    Index jj = std::clamp<Index>(j - P, 0, nx - 1);
    return model_.velocity()(ii, jj);
  };
  // Depth into the PML of a (possibly half-integer) total-grid coordinate.
  auto depth = [&](double c, Index n) {
    double lo = static_cast<double>(P), hi = static_cast<double>(P + n - 1);
    if (c < lo)
      return (lo - c) * h;
    if (c > hi)
      return (c - hi) * h;
    return 0.0;
  };
  auto stretch = [&](double d) {
    double sigma = pml_.strength * v_pml / Lp * (d / Lp) * (d / Lp);
    return Complex(1.0, 0.0) - I * sigma / omega;
  };
  auto id = [&](Index i, Index j) { return i * nx_t + j; };

  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<size_t>(nx_t * nz_t * 13));
  auto add = [&](Index a, Index b, Complex v) { trip.emplace_back(a, b, v); };

  const double ih2 = 1.0 / (h * h);
  for (Index i = 0; i < nz_t; ++i) {
    for (Index j = 0; j < nx_t; ++j) {
      const Index n = id(i, j);
      const double v = vel(i, j);
      const double k2 = (omega / v) * (omega / v);
      const double dz = depth(static_cast<double>(i), nz), dx = depth(static_cast<double>(j), nx);
      const Complex sx = stretch(dx), sz = stretch(dz);

      // -d/dx (sz/sx d/dx), coefficients at half nodes.
      for (int side : {-1, 1}) {
        Index jn = j + side;
        double dxh = depth(static_cast<double>(j) + 0.5 * side, nx);
        Complex a = sz / stretch(dxh) * ih2;
        add(n, n, a);
        if (jn >= 0 && jn < nx_t)
          add(n, id(i, jn), -a);
      }
      // -d/dz (sx/sz d/dz).
      for (int side : {-1, 1}) {
        Index in = i + side;
        double dzh = depth(static_cast<double>(i) + 0.5 * side, nz);
        Complex a = sx / stretch(dzh) * ih2;
        add(n, n, a);
        if (in >= 0 && in < nz_t)
          add(n, id(in, j), -a);
      }
      // Mass term kappa^2 (1 - (h^2/30) sym Delta_h) u - (7/60) kappa^4 h^2 u
      // + (1/180) kappa^6 h^4 u: with the compact Laplacian this is sixth
      // order where kappa is constant. Edge blocks of the Delta_h part below.
      const double s2 = k2 * h * h;
      add(n, n, -k2 * (1.0 - 7.0 / 60.0 * s2 + s2 * s2 / 180.0) * sx * sz);
    }
  }
  // Edge blocks of the mass correction and cell blocks of the mixed
  // derivative over the whole grid, stretched like the Laplacian so the
  // scheme is the same on both sides of the PML interface.
  for (Index i = 0; i < nz_t; ++i) {
    for (Index j = 0; j < nx_t; ++j) {
      const double ka = std::pow(omega / vel(i, j), 2);
      const Complex sxh = stretch(depth(static_cast<double>(j) + 0.5, nx));
      const Complex szh = stretch(depth(static_cast<double>(i) + 0.5, nz));
      for (auto [di, dj] : {std::pair<Index, Index>{0, 1}, {1, 0}}) {
        Index i2 = i + di, j2 = j + dj;
        if (i2 >= nz_t || j2 >= nx_t)
          continue;
        const double kb = std::pow(omega / vel(i2, j2), 2);
        const Complex r = dj == 1 ? stretch(depth(static_cast<double>(i), nz)) / sxh
                                  : stretch(depth(static_cast<double>(j), nx)) / szh;
        const Index a = id(i, j), b = id(i2, j2);
        // (1/30) [[-ka, (ka+kb)/2], [(ka+kb)/2, -kb]]
        add(a, a, -ka / 30.0 * r);
        add(b, b, -kb / 30.0 * r);
        add(a, b, (ka + kb) / 60.0 * r);
        add(b, a, (ka + kb) / 60.0 * r);
      }
      if (i + 1 < nz_t && j + 1 < nx_t) {
        const Index c[4] = {id(i, j), id(i, j + 1), id(i + 1, j), id(i + 1, j + 1)};
        const double q[4] = {1.0, -1.0, -1.0, 1.0};
        const Complex w = -ih2 / 6.0 / (sxh * szh);
        for (int p = 0; p < 4; ++p)
          for (int s = 0; s < 4; ++s)
            add(c[p], c[s], w * q[p] * q[s]);
      }
    }
  }

  impl_->A.resize(nx_t * nz_t, nx_t * nz_t);
  impl_->A.setFromTriplets(trip.begin(), trip.end());
  impl_->A.makeCompressed();
  impl_->lu.compute(impl_->A);
  if (impl_->lu.info() != Eigen::Success)
    throw NumericalError("helmholtz: sparse factorization failed");
  impl_->nx_t = nx_t;
  impl_->nz_t = nz_t;
  impl_->frequency = frequency;
}

HelmholtzField
HelmholtzSolver::solve(const std::vector<std::pair<std::pair<Index, Index>, Complex>> &sources) const {
  if (impl_->frequency == 0)
    throw Error("helmholtz: solve() before factorize()");
  const Index P = pml_.width;
  const double h = model_.h();
  CVector rhs = CVector::Zero(impl_->A.rows());
  for (const auto &[node, q] : sources) {
    auto [i, j] = node;
    if (i < 0 || i >= model_.nz() || j < 0 || j >= model_.nx())
      throw DomainError("helmholtz: source outside the interior region");
    // Far-field gain of the discrete point source is 1 / ((sin s / s)(1 - s^2/30)).
    const double sk = 2.0 * std::numbers::pi * impl_->frequency * h / model_.velocity()(i, j);
    const double gain = std::sin(sk) / sk * (1.0 - sk * sk / 30.0);
    rhs[(i + P) * impl_->nx_t + (j + P)] += q * gain / (h * h);
  }
  HelmholtzField field;
  field.pml = static_cast<int>(P);
  field.h = h;
  field.values = Eigen::MatrixXcd::Zero(impl_->nz_t, impl_->nx_t);
  double bnorm = rhs.norm();
  if (bnorm == 0.0)
    return field;
  CVector u = impl_->lu.solve(rhs);
  if (impl_->lu.info() != Eigen::Success || !u.allFinite())
    throw NumericalError("helmholtz: sparse solve failed");
  field.relative_residual = (impl_->A * u - rhs).norm() / bnorm;
  if (field.relative_residual > 1e-8)
    throw NumericalError("helmholtz: linear solve residual " + std::to_string(field.relative_residual) +
                         " above 1e-8");
  for (Index i = 0; i < impl_->nz_t; ++i)
    for (Index j = 0; j < impl_->nx_t; ++j)
      field.values(i, j) = u[i * impl_->nx_t + j];
  return field;
}

Eigen::MatrixXcd HelmholtzField::interior() const {
  return values.block(pml, pml, values.rows() - 2 * pml, values.cols() - 2 * pml);
}

HelmholtzField helmholtz_solve(const HelmholtzProblem &problem) {
  HelmholtzSolver solver(problem.model, problem.pml);
  solver.factorize(problem.frequency, problem.allow_coarse);
  auto node = problem.model.node(problem.src_x, problem.src_z);
  return solver.solve({{node, problem.amplitude}});
}

GreenComparison compare_with_green(const HelmholtzField &field, const HelmholtzProblem &problem,
                                   double min_source_distance, double min_pml_distance) {
  const VelocityModel &m = problem.model;
  const double v = m.velocity()(0, 0);
  if ((m.velocity().array() != v).any())
    throw DomainError("compare_with_green: model is not homogeneous");
  const double kappa = 2.0 * std::numbers::pi * problem.frequency / v;
  auto [si, sj] = m.node(problem.src_x, problem.src_z);
  const double h = m.h();
  const double xs = static_cast<double>(sj) * h, zs = static_cast<double>(si) * h;
  const double x_max = static_cast<double>(m.nx() - 1) * h, z_max = static_cast<double>(m.nz() - 1) * h;
  GreenComparison out;
  for (Index i = 0; i < m.nz(); ++i) {
    for (Index j = 0; j < m.nx(); ++j) {
      double x = static_cast<double>(j) * h, z = static_cast<double>(i) * h;
      double edge = std::min({x, z, x_max - x, z_max - z});
      double r = std::hypot(x - xs, z - zs);
      if (r < min_source_distance || edge < min_pml_distance)
        continue;
      Complex expect = problem.amplitude * green_2d(kappa, r);
      Complex got = field.at(i, j);
      out.max_magnitude_error = std::max(out.max_magnitude_error, std::abs(std::abs(got) / std::abs(expect) - 1.0));
      out.max_phase_error = std::max(out.max_phase_error, std::abs(std::arg(got / expect)));
      ++out.receivers;
    }
  }
  return out;
}

} // namespace envl0
