#include "envl0/regularization.h"

#include <cmath>

namespace envl0 {

namespace {

void require_beta(double beta, const char *what) {
  if (!(beta > 0) || !std::isfinite(beta))
    throw DomainError(std::string(what) + ": beta must be positive and finite");
}

} // namespace

RegParams::RegParams(double beta, double gamma) : beta_(beta), gamma_(gamma) {
  require_beta(beta, "RegParams");
  if (!(gamma > 0) || !std::isfinite(gamma))
    throw DomainError("RegParams: gamma must be positive and finite");
}

double RegParams::threshold() const { return std::sqrt(2.0 * beta_); }

bool RegParams::admissible() const { return ratio() < golden_ratio_bound(); }

double golden_ratio_bound() { return (std::sqrt(5.0) - 1.0) / 2.0; }

double prox_l0_scalar(double y, double beta) {
  require_beta(beta, "prox_l0");
  return std::abs(y) > std::sqrt(2.0 * beta) ? y : 0.0;
}

Vector prox_l0(const Vector &y, double beta) {
  require_beta(beta, "prox_l0");
  const double t = std::sqrt(2.0 * beta);
  return y.unaryExpr([t](double v) { return std::abs(v) > t ? v : 0.0; });
}

double env_l0(const Vector &x, double beta) {
  require_beta(beta, "env_l0");
  const double t = std::sqrt(2.0 * beta);
  double sum = 0.0;
  for (double v : x)
    sum += std::abs(v) >= t ? 1.0 : v * v / (2.0 * beta);
  return sum;
}

Vector soft_threshold(const Vector &v, double tau) {
  if (!(tau >= 0))
    throw DomainError("soft_threshold: tau must be non-negative");
  return v.unaryExpr([tau](double a) {
    double m = std::abs(a) - tau;
    return m > 0 ? std::copysign(m, a) : 0.0;
  });
}

Index count_nonzero(const Vector &x) { return (x.array() != 0.0).count(); }

CVector residual(const MeasurementOperator &op, const Vector &y, const CVector &r) {
  require_size(r.size(), op.range_dim(), "residual");
  return op.apply(y) - r;
}

double objective_G(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &x,
                   const Vector &y) {
  require_size(x.size(), y.size(), "objective_G");
  return 0.5 * residual(op, y, r).squaredNorm() + p.gamma() / (2.0 * p.beta()) * (x - y).squaredNorm();
}

double objective_F(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &x,
                   const Vector &y) {
  return objective_G(op, r, p, x, y) + p.gamma() * static_cast<double>(count_nonzero(x));
}

double objective_Q(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &y) {
  return 0.5 * residual(op, y, r).squaredNorm() + p.gamma() * env_l0(y, p.beta());
}

double objective_E(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &y) {
  return 0.5 * p.smoothness() * residual(op, y, r).squaredNorm();
}

} // namespace envl0
