#pragma once

#include "envl0/operators.h"
#include "envl0/regularization.h"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace envl0 {

enum class YUpdate { closed_form, inner_loop };

struct SolverConfig {
  RegParams params;
  double tol = 1e-6;
  int max_iter = 5000;
  YUpdate y_update = YUpdate::closed_form;
  int inner_max = 1000;
  double inner_tol = 1e-12;
  bool allow_inadmissible = false;
  /// Optional initial y; x^0 is always zero.
  std::optional<Vector> warm_start;

  explicit SolverConfig(RegParams p) : params(p) {}
  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double F = 0, Q = 0, G = 0;
  Index support_size = 0;
  std::uint64_t support_hash = 0;
  double rel_change = 0;
  double fp_residual = 0;
  /// ||x^k - x^{k-1}||.
  double x_step = 0;
  bool support_changed = false;
};

struct SolveTrace {
  /// F at the initial pair (x^0, y^0).
  double initial_F = 0;
  std::vector<IterationRecord> records;
  int iterations = 0;
  bool converged = false;
  /// First iteration from which the support never changes again.
  int support_stable_from = 0;
};

struct El0mResult {
  Vector x;
  Vector y;
  SolveTrace trace;
};

El0mResult el0m_solve(const MeasurementOperator &op, const CVector &r, const SolverConfig &config);

/// One step of v <- x - c K*(K v - r). Requires 0 < c < 1.
Vector el0m_inner_step(const MeasurementOperator &op, const Vector &x, const Vector &v_prev, double c,
                       const CVector &r);

/// Outcome of checking a trace against the descent and support properties.
struct TraceAudit {
  bool monotone = true;
  double worst_increase = 0;
  bool jump_bound = true;
  double smallest_jump = 0; ///< smallest x step among support changes, +inf if none
  bool support_stable = true;
  bool fixed_point = true;
  double fp_ratio = 0; ///< final fp residual / (tol * max(||y||, 1))
  bool ok() const { return monotone && jump_bound && support_stable && fixed_point; }
};

/// Monotone F (slack 1e-12, relative to the initial value), jump bound on
/// support changes, and for converged runs support stabilization and a
/// fixed-point residual within 10 tol max(||y||, 1).
TraceAudit audit_trace(const El0mResult &result, const SolverConfig &config);

void write_trace_csv(std::ostream &os, const SolveTrace &trace);

struct L1Record {
  int iter = 0;
  double objective = 0;
  double rel_change = 0;
};

struct L1Trace {
  std::vector<L1Record> records;
  int iterations = 0;
  bool converged = false;
  double fp_residual = 0;
};

struct L1mResult {
  Vector y;
  L1Trace trace;
};

L1mResult l1m_solve(const MeasurementOperator &op, const CVector &r, double gamma, double tol = 1e-6,
                    int max_iter = 5000);

/// u = (1/lambda) W* y.
Vector reconstruct_signal(const FrameletSystem &framelet, const Vector &y, double lambda);

} // namespace envl0
