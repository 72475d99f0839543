#include "envl0/evaluation.h"

#include "envl0/io.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace envl0 {

double snr(const Vector &orig, const Vector &reco) {
  require_size(reco.size(), orig.size(), "snr");
  double num = orig.squaredNorm();
  if (!(num > 0))
    throw DomainError("snr: original signal is zero");
  double den = (orig - reco).squaredNorm();
  if (den == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

double aligned_snr(const Vector &orig, const Vector &reco, int max_lag, int *best_lag) {
  require_size(reco.size(), orig.size(), "aligned_snr");
  if (max_lag < 0)
    throw DomainError("aligned_snr: max_lag must be non-negative");
  const Index M = reco.size();
  double best = -std::numeric_limits<double>::infinity();
  int lag_at = 0;
  Vector shifted(M);
  for (int lag = -max_lag; lag <= max_lag; ++lag) {
    for (Index n = 0; n < M; ++n)
      shifted[n] = reco[((n - lag) % M + M) % M];
    double s = snr(orig, shifted);
    if (s > best) {
      best = s;
      lag_at = lag;
    }
  }
  if (best_lag)
    *best_lag = lag_at;
  return best;
}

CVector add_noise(const CVector &r, const SamplingPlan &plan, const NoiseSpec &spec) {
  if (!(spec.sigma >= 0))
    throw DomainError("add_noise: sigma must be non-negative");
  require_size(r.size(), plan.size(), "add_noise");
  if (hermitian_defect(plan, r) > 1e-12 * std::max(1.0, r.norm()))
    throw DomainError("add_noise: input is not Hermitian-consistent");
  CVector out = r;
  if (spec.sigma == 0.0)
    return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, spec.sigma);
  for (Index m : plan.low_half_rows()) {
    Index i = plan.position(m);
    if (plan.is_self_conjugate(m)) {
      out[i] += normal(rng);
      continue;
    }
    double re = normal(rng);
    double im = normal(rng);
    out[i] += Complex(re, im);
    out[plan.position(plan.conjugate_row(m))] = std::conj(out[i]);
  }
  return out;
}

std::vector<std::string> ExperimentReport::cases() const {
  std::vector<std::string> out;
  for (const auto &r : rows)
    if (std::find(out.begin(), out.end(), r.case_id) == out.end())
      out.push_back(r.case_id);
  return out;
}

std::vector<std::string> ExperimentReport::methods() const {
  std::vector<std::string> out;
  for (const auto &r : rows)
    if (std::find(out.begin(), out.end(), r.method) == out.end())
      out.push_back(r.method);
  return out;
}

double ExperimentReport::mean_snr(const std::string &case_id, const std::string &method) const {
  double sum = 0;
  int n = 0;
  for (const auto &r : rows)
    if (r.case_id == case_id && r.method == method) {
      sum += r.snr_db;
      ++n;
    }
  return n ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

const ReportRow *ExperimentReport::find(const std::string &case_id, const std::string &method, int trial) const {
  for (const auto &r : rows)
    if (r.case_id == case_id && r.method == method && r.trial == trial)
      return &r;
  return nullptr;
}

void write_report_csv(std::ostream &os, const ExperimentReport &report, bool with_timing) {
  os << "experiment,case,trial,method,snr_db,iterations,wall_ms,beta,gamma,seed\n";
  for (const auto &r : report.rows)
    os << r.experiment << ',' << r.case_id << ',' << r.trial << ',' << r.method << ',' << format_double(r.snr_db)
       << ',' << r.iterations << ',' << (with_timing ? format_double(std::round(r.wall_ms * 1000) / 1000) : "0")
       << ',' << format_double(r.beta) << ',' << format_double(r.gamma) << ',' << r.seed << '\n';
}

void print_summary(std::ostream &os, const ExperimentReport &report) {
  auto methods = report.methods();
  os << report.id << " (mean SNR, dB)\n";
  os << std::left << std::setw(14) << "case";
  for (const auto &m : methods)
    os << std::right << std::setw(16) << m;
  os << '\n';
  for (const auto &c : report.cases()) {
    os << std::left << std::setw(14) << c;
    for (const auto &m : methods) {
      double v = report.mean_snr(c, m);
      std::ostringstream cell;
      if (std::isnan(v))
        cell << "-";
      else
        cell << std::fixed << std::setprecision(2) << v;
      os << std::right << std::setw(16) << cell.str();
    }
    os << '\n';
  }
  for (const auto &n : report.notes)
    os << "  " << n << '\n';
}

std::string format_fmax(double f) {
  std::ostringstream os;
  os << f;
  return os.str();
}

} // namespace envl0
