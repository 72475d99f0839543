#include "envl0/operators.h"

#define EIGEN_FFTW_DEFAULT
#include <unsupported/Eigen/FFT>

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>

namespace envl0 {

namespace {

Eigen::FFT<double> &fft_engine() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

bool on_grid(double f, double record_length) {
  double k = f * record_length;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

} // namespace

FourierSpec::FourierSpec(Index length) : length_(length) {
  if (length < 1)
    throw DomainError("FourierSpec: length must be positive");
}

CVector dft_apply(const FourierSpec &spec, const CVector &v) {
  require_size(v.size(), spec.length(), "dft_apply");
  CVector out(v.size());
  fft_engine().fwd(out, v);
  return out / std::sqrt(static_cast<double>(spec.length()));
}

CVector dft_adjoint(const FourierSpec &spec, const CVector &z) {
  require_size(z.size(), spec.length(), "dft_adjoint");
  CVector out(z.size());
  fft_engine().inv(out, z);
  return out / std::sqrt(static_cast<double>(spec.length()));
}

// ---------------------------------------------------------------------------

SamplingPlan::SamplingPlan(Index length, std::vector<Index> rows)
    : length_(length), rows_(std::move(rows)), lookup_(static_cast<size_t>(length + 1), -1) {
  for (size_t i = 0; i < rows_.size(); ++i)
    lookup_[static_cast<size_t>(rows_[i])] = static_cast<Index>(i);
}

SamplingPlan SamplingPlan::from_rows(Index length, std::vector<Index> rows) {
  if (length < 1)
    throw DomainError("SamplingPlan: length must be positive");
  std::sort(rows.begin(), rows.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw DomainError("SamplingPlan: duplicate row");
  for (Index m : rows)
    if (m < 1 || m > length)
      throw DomainError("SamplingPlan: row " + std::to_string(m) + " outside 1.." + std::to_string(length));
  SamplingPlan plan(length, std::move(rows));
  for (Index m : plan.rows_)
    if (!plan.contains(plan.conjugate_row(m)))
      throw DomainError("SamplingPlan: row " + std::to_string(m) + " present without its conjugate row " +
                        std::to_string(plan.conjugate_row(m)));
  return plan;
}

SamplingPlan SamplingPlan::closure_of(Index length, const std::vector<Index> &rows) {
  std::vector<Index> closed;
  closed.reserve(2 * rows.size());
  for (Index m : rows) {
    if (m < 1 || m > length)
      throw DomainError("SamplingPlan: row " + std::to_string(m) + " outside 1.." + std::to_string(length));
    closed.push_back(m);
    closed.push_back(m == 1 ? 1 : length - m + 2);
  }
  std::sort(closed.begin(), closed.end());
  closed.erase(std::unique(closed.begin(), closed.end()), closed.end());
  return from_rows(length, std::move(closed));
}

SamplingPlan SamplingPlan::full(Index length) {
  std::vector<Index> rows(static_cast<size_t>(length));
  std::iota(rows.begin(), rows.end(), Index{1});
  return from_rows(length, std::move(rows));
}

bool SamplingPlan::contains(Index row) const { return position(row) >= 0; }

Index SamplingPlan::position(Index row) const {
  if (row < 1 || row > length_)
    return -1;
  return lookup_[static_cast<size_t>(row)];
}

Index SamplingPlan::conjugate_row(Index row) const { return row == 1 ? 1 : length_ - row + 2; }

std::vector<Index> SamplingPlan::low_half_rows() const {
  std::vector<Index> out;
  for (Index m : rows_)
    if (is_low_half(m))
      out.push_back(m);
  return out;
}

SamplingPlan SamplingPlan::with_record_length(double seconds) const {
  if (!(seconds > 0))
    throw DomainError("SamplingPlan: record length must be positive");
  SamplingPlan copy = *this;
  copy.record_length_ = seconds;
  return copy;
}

std::optional<double> SamplingPlan::frequency(Index row) const {
  if (!record_length_ || !contains(row) || !is_low_half(row))
    return std::nullopt;
  return static_cast<double>(row - 1) / *record_length_;
}

SamplingPlan build_band_plan(Index length, double record_length, double f_min, double f_max, BandSnap snap) {
  if (length < 2)
    throw DomainError("build_band_plan: length must be at least 2");
  if (!(record_length > 0))
    throw DomainError("build_band_plan: record length must be positive");
  if (!(f_min > 0) || !(f_min <= f_max) || !(f_max < static_cast<double>(length) / record_length))
    throw DomainError("build_band_plan: need 0 < f_min <= f_max < M/T");
  Index k_lo, k_hi;
  if (snap == BandSnap::strict) {
    if (!on_grid(f_min, record_length) || !on_grid(f_max, record_length))
      throw DomainError("build_band_plan: f_min/f_max not on the frequency grid");
    k_lo = static_cast<Index>(std::llround(f_min * record_length));
    k_hi = static_cast<Index>(std::llround(f_max * record_length));
  } else {
    k_lo = static_cast<Index>(std::ceil(f_min * record_length - 1e-9));
    k_hi = static_cast<Index>(std::floor(f_max * record_length + 1e-9));
    if (k_lo > k_hi)
      throw DomainError("build_band_plan: no grid frequency inside the band");
  }
  std::vector<Index> rows;
  for (Index k = k_lo; k <= k_hi; ++k)
    rows.push_back(k + 1);
  return SamplingPlan::closure_of(length, rows).with_record_length(record_length);
}

SamplingPlan build_random_plan(Index length, const std::vector<Index> &candidate_rows, double fraction,
                               std::uint64_t seed) {
  if (!(fraction > 0) || fraction > 1)
    throw DomainError("build_random_plan: fraction must be in (0, 1]");
  std::vector<Index> pool = candidate_rows;
  std::sort(pool.begin(), pool.end());
  if (std::adjacent_find(pool.begin(), pool.end()) != pool.end())
    throw DomainError("build_random_plan: duplicate candidate row");
  for (Index m : pool)
    if (m < 2 || 2 * (m - 1) > length)
      throw DomainError("build_random_plan: candidate row " + std::to_string(m) + " outside the low half");
  auto count = static_cast<size_t>(std::floor(fraction * static_cast<double>(pool.size()) + 0.5));
  if (count == 0)
    throw DomainError("build_random_plan: fraction selects no rows");
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates with explicit index draws; std::shuffle is not
  // specified to be identical across standard libraries.
  for (size_t i = 0; i < count; ++i) {
    std::uint64_t span = pool.size() - i;
    std::uint64_t j = i + rng() % span;
    std::swap(pool[i], pool[static_cast<size_t>(j)]);
  }
  pool.resize(count);
  return SamplingPlan::closure_of(length, pool);
}

CVector select(const SamplingPlan &plan, const CVector &z) {
  require_size(z.size(), plan.length(), "select");
  CVector out(plan.size());
  for (Index i = 0; i < plan.size(); ++i)
    out[i] = z[plan.rows()[static_cast<size_t>(i)] - 1];
  return out;
}

CVector select_adjoint(const SamplingPlan &plan, const CVector &w) {
  require_size(w.size(), plan.size(), "select_adjoint");
  CVector out = CVector::Zero(plan.length());
  for (Index i = 0; i < plan.size(); ++i)
    out[plan.rows()[static_cast<size_t>(i)] - 1] = w[i];
  return out;
}

double hermitian_defect(const SamplingPlan &plan, const CVector &w) {
  require_size(w.size(), plan.size(), "hermitian_defect");
  double worst = 0.0;
  for (Index i = 0; i < plan.size(); ++i) {
    Index j = plan.position(plan.conjugate_row(plan.rows()[static_cast<size_t>(i)]));
    worst = std::max(worst, std::abs(w[i] - std::conj(w[j])));
  }
  return worst;
}

// ---------------------------------------------------------------------------

FilterBank piecewise_linear_filters() {
  const double b = std::sqrt(2.0) / 4.0;
  return {{{0.25, 0.5, 0.25}, {b, 0.0, -b}, {-0.25, 0.5, -0.25}}};
}

FrameletSystem::FrameletSystem(Index signal_length, int levels, FilterBank filters)
    : length_(signal_length), levels_(levels), filters_(filters) {
  if (levels < 1)
    throw DomainError("FrameletSystem: at least one level is required");
  if (signal_length < 3)
    throw DomainError("FrameletSystem: signal length must be at least 3");
}

namespace {

// out[n] = sum_k h[k] v[n + (k-1) s], periodic. The wrap-around is peeled
// off so the middle range runs without index arithmetic.
void correlate(const std::array<double, 3> &h, Index s, const double *v, double *out, Index M) {
  const Index sm = s % M;
  if (2 * sm > M) {
    for (Index n = 0; n < M; ++n)
      out[n] = h[0] * v[(n - sm + M) % M] + h[1] * v[n] + h[2] * v[(n + sm) % M];
    return;
  }
  for (Index n = 0; n < sm; ++n)
    out[n] = h[0] * v[n - sm + M] + h[1] * v[n] + h[2] * v[n + sm];
  for (Index n = sm; n < M - sm; ++n)
    out[n] = h[0] * v[n - sm] + h[1] * v[n] + h[2] * v[n + sm];
  for (Index n = M - sm; n < M; ++n)
    out[n] = h[0] * v[n - sm] + h[1] * v[n] + h[2] * v[n + sm - M];
}

// Adjoint of correlate, accumulated: out[n] += sum_k h[k] c[n - (k-1) s].
void correlate_adjoint_add(const std::array<double, 3> &h, Index s, const double *c, double *out, Index M) {
  const Index sm = s % M;
  if (2 * sm > M) {
    for (Index n = 0; n < M; ++n)
      out[n] += h[0] * c[(n + sm) % M] + h[1] * c[n] + h[2] * c[(n - sm + M) % M];
    return;
  }
  for (Index n = 0; n < sm; ++n)
    out[n] += h[0] * c[n + sm] + h[1] * c[n] + h[2] * c[n - sm + M];
  for (Index n = sm; n < M - sm; ++n)
    out[n] += h[0] * c[n + sm] + h[1] * c[n] + h[2] * c[n - sm];
  for (Index n = M - sm; n < M; ++n)
    out[n] += h[0] * c[n + sm - M] + h[1] * c[n] + h[2] * c[n - sm];
}

} // namespace

Vector FrameletSystem::analysis(const Vector &v) const {
  require_size(v.size(), length_, "framelet analysis");
  const Index M = length_;
  Vector y(coefficient_length());
  Vector low = v, next(M);
  for (int l = 1; l <= levels_; ++l) {
    Index s = Index{1} << (l - 1);
    double *band = y.data() + (2 * l - 1) * M;
    correlate(filters_[1], s, low.data(), band, M);
    correlate(filters_[2], s, low.data(), band + M, M);
    correlate(filters_[0], s, low.data(), next.data(), M);
    low.swap(next);
  }
  y.head(M) = low;
  return y;
}

Vector FrameletSystem::synthesis(const Vector &y) const {
  require_size(y.size(), coefficient_length(), "framelet synthesis");
  const Index M = length_;
  Vector low = y.head(M), next(M);
  for (int l = levels_; l >= 1; --l) {
    Index s = Index{1} << (l - 1);
    const double *band = y.data() + (2 * l - 1) * M;
    next.setZero();
    correlate_adjoint_add(filters_[0], s, low.data(), next.data(), M);
    correlate_adjoint_add(filters_[1], s, band, next.data(), M);
    correlate_adjoint_add(filters_[2], s, band + M, next.data(), M);
    low.swap(next);
  }
  return low;
}

// ---------------------------------------------------------------------------

MeasurementOperator::MeasurementOperator(FourierSpec spec, SamplingPlan plan, FrameletSystem framelet)
    : spec_(spec), plan_(std::move(plan)), framelet_(std::move(framelet)) {
  if (plan_.length() != spec_.length() || framelet_.signal_length() != spec_.length())
    throw DimensionError("MeasurementOperator: DFT, plan and framelet lengths differ");
}

namespace {

// Real-input transforms for K and K*. Plans are cached per thread and length.
class RealFft {
public:
  explicit RealFft(Index M) : M_(M), half_(M / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<size_t>(M));
    spec_ = fftw_alloc_complex(static_cast<size_t>(half_));
    r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(M), real_, spec_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(M), spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  Index length() const { return M_; }
  Index half() const { return half_; }
  double *real() { return real_; }
  Complex *spectrum() { return reinterpret_cast<Complex *>(spec_); }
  void forward() { fftw_execute(r2c_); }
  void backward() { fftw_execute(c2r_); }

private:
  Index M_, half_;
  double *real_;
  fftw_complex *spec_;
  fftw_plan r2c_, c2r_;
};

RealFft &real_fft(Index M) {
  thread_local std::vector<std::unique_ptr<RealFft>> cache;
  for (auto &p : cache)
    if (p->length() == M)
      return *p;
  cache.push_back(std::make_unique<RealFft>(M));
  return *cache.back();
}

} // namespace

CVector MeasurementOperator::apply(const Vector &y) const {
  const Index M = spec_.length();
  Vector v = framelet_.synthesis(y);
  RealFft &fft = real_fft(M);
  std::copy(v.data(), v.data() + M, fft.real());
  fft.forward();
  const Complex *bins = fft.spectrum();
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  CVector out(plan_.size());
  for (Index i = 0; i < plan_.size(); ++i) {
    Index k = plan_.rows()[static_cast<size_t>(i)] - 1;
    out[i] = scale * (k < fft.half() ? bins[k] : std::conj(bins[M - k]));
  }
  return out;
}

Vector MeasurementOperator::adjoint(const CVector &w, bool checked) const {
  require_size(w.size(), plan_.size(), "k_adjoint");
  const Index M = spec_.length();
  // Re(F* x) = F* h with h the Hermitian part of x; the anti-Hermitian part
  // carries the discarded imaginary component.
  CVector x = CVector::Zero(M);
  for (Index i = 0; i < plan_.size(); ++i)
    x[plan_.rows()[static_cast<size_t>(i)] - 1] = w[i];
  RealFft &fft = real_fft(M);
  Complex *h = fft.spectrum();
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (Index k = 0; k < fft.half(); ++k)
    h[k] = 0.5 * scale * (x[k] + std::conj(x[(M - k) % M]));
  if (checked) {
    double re = 0, im = 0;
    for (Index k = 0; k < M; ++k) {
      Complex c = x[(M - k) % M];
      re += std::norm(0.5 * (x[k] + std::conj(c)));
      im += std::norm(0.5 * (x[k] - std::conj(c)));
    }
    re = std::sqrt(re);
    im = std::sqrt(im);
    if (im > 1e-6 * std::max(re, 1e-300) && im > 1e-12)
      throw NumericalError("k_adjoint: input is not Hermitian-symmetric on the plan");
  }
  fft.backward();
  Vector z(M);
  std::copy(fft.real(), fft.real() + M, z.data());
  return framelet_.analysis(z);
}

Vector MeasurementOperator::gram(const Vector &y) const { return adjoint(apply(y)); }

Vector normal_solve(const MeasurementOperator &op, double c, const Vector &b) {
  if (!(c > 0))
    throw DomainError("normal_solve: c must be positive");
  require_size(b.size(), op.domain_dim(), "normal_solve");
  return b - (c / (1.0 + c)) * op.gram(b);
}

} // namespace envl0
