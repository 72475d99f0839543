#pragma once

#include "envl0/operators.h"
#include "envl0/types.h"

namespace envl0 {

/// Regularization pair for the l0 envelope model: beta > 0 (envelope width)
/// and gamma > 0 (weight). Construction validates both.
class RegParams {
public:
  RegParams(double beta, double gamma);

  double beta() const { return beta_; }
  double gamma() const { return gamma_; }
  double ratio() const { return beta_ / gamma_; }
  double threshold() const;
  /// L = 1 + beta/gamma.
  double smoothness() const { return 1.0 + ratio(); }
  /// beta/gamma < (sqrt(5)-1)/2, required for the descent guarantees.
  bool admissible() const;

private:
  double beta_;
  double gamma_;
};

double golden_ratio_bound();

double prox_l0_scalar(double y, double beta);
Vector prox_l0(const Vector &y, double beta);
/// sum_i phi(x_i), phi(x) = min(x^2 / (2 beta), 1).
double env_l0(const Vector &x, double beta);
Vector soft_threshold(const Vector &v, double tau);
Index count_nonzero(const Vector &x);

/// Residual K y - r, shared by all objectives below.
CVector residual(const MeasurementOperator &op, const Vector &y, const CVector &r);

double objective_F(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &x,
                   const Vector &y);
double objective_G(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &x,
                   const Vector &y);
double objective_Q(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &y);
double objective_E(const MeasurementOperator &op, const CVector &r, const RegParams &p, const Vector &y);

} // namespace envl0
