#include "envl0/solvers.h"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace envl0 {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::uint64_t support_hash(const Vector &x) {
  std::uint64_t h = 1469598103934665603ull;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0)
      continue;
    auto v = static_cast<std::uint64_t>(i);
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

bool same_support(const Vector &a, const Vector &b) {
  for (Index i = 0; i < a.size(); ++i)
    if ((a[i] != 0.0) != (b[i] != 0.0))
      return false;
  return true;
}

void require_finite(const Vector &v, const char *what, int iter) {
  if (!v.allFinite())
    throw NumericalError(std::string(what) + ": non-finite iterate at iteration " + std::to_string(iter));
}

void require_hermitian(const MeasurementOperator &op, const CVector &r, const char *what) {
  require_size(r.size(), op.range_dim(), what);
  if (!r.allFinite())
    throw NumericalError(std::string(what) + ": non-finite data");
  double scale = std::max(r.norm(), 1.0);
  if (hermitian_defect(op.plan(), r) > 1e-10 * scale)
    throw DomainError(std::string(what) + ": data is not Hermitian-consistent on the plan");
}

} // namespace

void SolverConfig::validate() const {
  if (!(tol > 0))
    throw DomainError("SolverConfig: tol must be positive");
  if (max_iter < 1)
    throw DomainError("SolverConfig: max_iter must be at least 1");
  if (!allow_inadmissible && !params.admissible())
    throw DomainError("SolverConfig: beta/gamma = " + std::to_string(params.ratio()) +
                      " is not below (sqrt(5)-1)/2");
  if (y_update == YUpdate::inner_loop) {
    if (params.ratio() >= 1.0)
      throw DomainError("SolverConfig: inner loop needs beta/gamma < 1");
    if (inner_max < 1 || !(inner_tol > 0))
      throw DomainError("SolverConfig: invalid inner loop settings");
  }
}

Vector el0m_inner_step(const MeasurementOperator &op, const Vector &x, const Vector &v_prev, double c,
                       const CVector &r) {
  if (!(c > 0) || !(c < 1))
    throw DomainError("el0m_inner_step: c must lie in (0, 1)");
  require_size(x.size(), op.domain_dim(), "el0m_inner_step");
  require_size(v_prev.size(), op.domain_dim(), "el0m_inner_step");
  return x - c * op.adjoint(op.apply(v_prev) - r);
}

El0mResult el0m_solve(const MeasurementOperator &op, const CVector &r, const SolverConfig &config) {
  config.validate();
  require_hermitian(op, r, "el0m_solve");
  const RegParams &p = config.params;
  const double c = p.ratio();
  const double beta = p.beta(), gamma = p.gamma();
  const Index N = op.domain_dim();

  const Vector Kr = op.adjoint(r);
  Vector x = Vector::Zero(N);
  Vector y = Vector::Zero(N);
  if (config.warm_start) {
    require_size(config.warm_start->size(), N, "el0m_solve warm start");
    y = *config.warm_start;
  }

  El0mResult out;
  SolveTrace &trace = out.trace;
  {
    CVector res = op.apply(y) - r;
    trace.initial_F = 0.5 * res.squaredNorm() + gamma / (2 * beta) * (x - y).squaredNorm() +
                      gamma * static_cast<double>(count_nonzero(x));
  }

  Vector x_next(N), y_next(N);
  Vector x_fp = prox_l0(y, beta);
  for (int k = 1; k <= config.max_iter; ++k) {
    x_next.swap(x_fp);
    Vector b = x_next + c * Kr;
    CVector res;
    Vector grad;
    if (config.y_update == YUpdate::closed_form) {
      // With a = c/(1+c) and KK* = I: K y = (1-a) K b and K*K y = (1-a) K*K b,
      // so one K and one K* per iteration give the iterate and its residual.
      const double a = c / (1.0 + c);
      CVector Kb = op.apply(b);
      Vector Pb = op.adjoint(Kb);
      y_next = b - a * Pb;
      res = (1.0 - a) * Kb - r;
      grad = (1.0 - a) * Pb - Kr;
    } else {
      Vector v = y;
      for (int j = 0; j < config.inner_max; ++j) {
        Vector v_new = x_next - c * (op.gram(v) - Kr);
        double d = (v_new - v).norm();
        v.swap(v_new);
        if (d <= config.inner_tol * std::max(v.norm(), 1.0))
          break;
      }
      y_next = v;
      res = op.apply(y_next) - r;
      grad = op.adjoint(res);
    }
    double fit = 0.5 * res.squaredNorm();
    if (!std::isfinite(fit))
      throw NumericalError("el0m_solve: non-finite iterate at iteration " + std::to_string(k));
    x_fp = prox_l0(y_next, beta);

    IterationRecord rec;
    rec.iter = k;
    rec.G = fit + gamma / (2 * beta) * (x_next - y_next).squaredNorm();
    rec.support_size = count_nonzero(x_next);
    rec.F = rec.G + gamma * static_cast<double>(rec.support_size);
    rec.Q = fit + gamma * env_l0(y_next, beta);
    rec.support_hash = support_hash(x_next);
    rec.rel_change = (y_next - y).norm() / std::max(y.norm(), kEps);
    rec.fp_residual = (y_next - (x_fp - c * grad)).norm();
    rec.x_step = (x_next - x).norm();
    rec.support_changed = !same_support(x_next, x);
    if (rec.support_changed)
      trace.support_stable_from = k;
    trace.records.push_back(rec);

    x.swap(x_next);
    y.swap(y_next);
    trace.iterations = k;
    if (rec.rel_change <= config.tol) {
      trace.converged = true;
      break;
    }
  }
  if (trace.support_stable_from == 0)
    trace.support_stable_from = 1;
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

TraceAudit audit_trace(const El0mResult &result, const SolverConfig &config) {
  TraceAudit a;
  a.smallest_jump = std::numeric_limits<double>::infinity();
  const SolveTrace &t = result.trace;
  const double tau = config.params.threshold();
  const double slack = 1e-12 * std::max(1.0, std::abs(t.initial_F));
  double prev = t.initial_F;
  for (const auto &rec : t.records) {
    double inc = rec.F - prev;
    if (inc > a.worst_increase)
      a.worst_increase = inc;
    if (inc > slack)
      a.monotone = false;
    prev = rec.F;
    if (rec.support_changed) {
      a.smallest_jump = std::min(a.smallest_jump, rec.x_step);
      if (rec.x_step < tau)
        a.jump_bound = false;
    }
  }
  if (t.converged && !t.records.empty()) {
    for (size_t i = static_cast<size_t>(t.support_stable_from); i < t.records.size(); ++i)
      if (t.records[i].support_hash != t.records[i - 1].support_hash)
        a.support_stable = false;
    double scale = config.tol * std::max(result.y.norm(), 1.0);
    a.fp_ratio = t.records.back().fp_residual / scale;
    a.fixed_point = a.fp_ratio <= 10.0;
  }
  return a;
}

void write_trace_csv(std::ostream &os, const SolveTrace &trace) {
  os << "iter,F,Q,G,support_size,rel_change,fp_residual\n";
  os << std::setprecision(17);
  for (const auto &r : trace.records)
    os << r.iter << ',' << r.F << ',' << r.Q << ',' << r.G << ',' << r.support_size << ',' << r.rel_change << ','
       << r.fp_residual << '\n';
}

L1mResult l1m_solve(const MeasurementOperator &op, const CVector &r, double gamma, double tol, int max_iter) {
  if (!(gamma > 0))
    throw DomainError("l1m_solve: gamma must be positive");
  if (!(tol > 0) || max_iter < 1)
    throw DomainError("l1m_solve: invalid tol or max_iter");
  require_hermitian(op, r, "l1m_solve");
  const Index N = op.domain_dim();
  const Vector Kr = op.adjoint(r);

  Vector y_prev = Vector::Zero(N), v = Vector::Zero(N), y(N);
  double t = 1.0;
  L1mResult out;
  for (int k = 1; k <= max_iter; ++k) {
    y = soft_threshold(v - (op.gram(v) - Kr), gamma);
    require_finite(y, "l1m_solve", k);
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    L1Record rec;
    rec.iter = k;
    rec.rel_change = (y - y_prev).norm() / std::max(y_prev.norm(), kEps);
    rec.objective = 0.5 * (op.apply(y) - r).squaredNorm() + gamma * y.lpNorm<1>();
    out.trace.records.push_back(rec);
    out.trace.iterations = k;
    if (rec.rel_change <= tol) {
      out.trace.converged = true;
      break;
    }
    v = y + ((t - 1.0) / t_next) * (y - y_prev);
    t = t_next;
    y_prev = y;
  }
  out.trace.fp_residual = (y - soft_threshold(y - (op.gram(y) - Kr), gamma)).norm();
  out.y = std::move(y);
  return out;
}

Vector reconstruct_signal(const FrameletSystem &framelet, const Vector &y, double lambda) {
  if (!(lambda > 0))
    throw DomainError("reconstruct_signal: lambda must be positive");
  return framelet.synthesis(y) / lambda;
}

} // namespace envl0
