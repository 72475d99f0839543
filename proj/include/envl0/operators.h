#pragma once

#include "envl0/types.h"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace envl0 {

/// Size of the unitary DFT, F_{mn} = exp(-2 pi i (m-1)(n-1) / M) / sqrt(M).
class FourierSpec {
public:
  explicit FourierSpec(Index length);
  Index length() const { return length_; }

private:
  Index length_;
};

CVector dft_apply(const FourierSpec &spec, const CVector &v);
CVector dft_adjoint(const FourierSpec &spec, const CVector &z);

/// Conjugate-closed set of observed DFT rows. Rows are 1-based everywhere in
/// the public interface: row m carries frequency index m-1.
class SamplingPlan {
public:
  /// Validates strict ordering after sorting, range and conjugate closure.
  static SamplingPlan from_rows(Index length, std::vector<Index> rows);
  /// Closes an arbitrary row set under m -> M-m+2 before validating.
  static SamplingPlan closure_of(Index length, const std::vector<Index> &rows);
  static SamplingPlan full(Index length);

  Index length() const { return length_; }
  Index size() const { return static_cast<Index>(rows_.size()); }
  const std::vector<Index> &rows() const { return rows_; }

  bool contains(Index row) const;
  /// Position of `row` inside rows(), or -1.
  Index position(Index row) const;
  Index conjugate_row(Index row) const;
  /// Rows whose frequency index k = row-1 satisfies k <= M/2, in order.
  std::vector<Index> low_half_rows() const;
  bool is_low_half(Index row) const { return 2 * (row - 1) <= length_; }
  bool is_self_conjugate(Index row) const { return conjugate_row(row) == row; }

  /// Attaches f = (row-1)/T to the low-half rows.
  SamplingPlan with_record_length(double seconds) const;
  std::optional<double> frequency(Index row) const;

  friend bool operator==(const SamplingPlan &a, const SamplingPlan &b) {
    return a.length_ == b.length_ && a.rows_ == b.rows_;
  }

private:
  SamplingPlan(Index length, std::vector<Index> rows);

  Index length_ = 0;
  std::vector<Index> rows_;
  std::vector<Index> lookup_; // row -> position, -1 when absent; index 0 unused
  std::optional<double> record_length_;
};

enum class BandSnap {
  strict, ///< f_min and f_max must lie on the 1/T grid
  inside, ///< take every grid frequency inside [f_min, f_max]
};

SamplingPlan build_band_plan(Index length, double record_length, double f_min, double f_max,
                             BandSnap snap = BandSnap::strict);

/// Draws round(fraction * |candidates|) rows (half rounds up) without
/// replacement, then closes under conjugation. Pure in all arguments.
SamplingPlan build_random_plan(Index length, const std::vector<Index> &candidate_rows,
                               double fraction, std::uint64_t seed);

CVector select(const SamplingPlan &plan, const CVector &z);
CVector select_adjoint(const SamplingPlan &plan, const CVector &w);

/// Three-tap filter bank (lowpass, bandpass, highpass) with taps at offsets
/// -s, 0, +s for dilation s.
using FilterBank = std::array<std::array<double, 3>, 3>;

/// Piecewise-linear B-spline tight framelet filters.
FilterBank piecewise_linear_filters();

/// Undecimated (a trous) multi-level framelet transform with periodic
/// boundary. Coefficients are stacked as [final lowpass | band_1 | high_1 |
/// ... | band_L | high_L], each block of length M.
class FrameletSystem {
public:
  FrameletSystem(Index signal_length, int levels, FilterBank filters = piecewise_linear_filters());

  Index signal_length() const { return length_; }
  int levels() const { return levels_; }
  Index redundancy() const { return 2 * levels_ + 1; }
  Index coefficient_length() const { return redundancy() * length_; }
  const FilterBank &filters() const { return filters_; }

  Vector analysis(const Vector &v) const;
  Vector synthesis(const Vector &y) const;

private:
  Index length_;
  int levels_;
  FilterBank filters_;
};

inline Vector framelet_analysis(const FrameletSystem &sys, const Vector &v) { return sys.analysis(v); }
inline Vector framelet_synthesis(const FrameletSystem &sys, const Vector &y) { return sys.synthesis(y); }

/// The composite K = R F W*, real framelet coefficients in, complex
/// measurements out. Immutable after construction.
class MeasurementOperator {
public:
  MeasurementOperator(FourierSpec spec, SamplingPlan plan, FrameletSystem framelet);

  const FourierSpec &spec() const { return spec_; }
  const SamplingPlan &plan() const { return plan_; }
  const FrameletSystem &framelet() const { return framelet_; }
  Index domain_dim() const { return framelet_.coefficient_length(); }
  Index range_dim() const { return plan_.size(); }

  CVector apply(const Vector &y) const;
  /// Re(W F* R* w). With `checked`, throws NumericalError if the discarded
  /// imaginary part exceeds 1e-6 of the result norm.
  Vector adjoint(const CVector &w, bool checked = false) const;
  /// K*K y.
  Vector gram(const Vector &y) const;

private:
  FourierSpec spec_;
  SamplingPlan plan_;
  FrameletSystem framelet_;
};

inline CVector k_apply(const MeasurementOperator &op, const Vector &y) { return op.apply(y); }
inline Vector k_adjoint(const MeasurementOperator &op, const CVector &w, bool checked = false) {
  return op.adjoint(w, checked);
}

/// Solves (I + c K*K) x = b through x = b - c/(1+c) K*K b, exact because K*K
/// is an orthogonal projector.
Vector normal_solve(const MeasurementOperator &op, double c, const Vector &b);

/// Largest |w_m - conj(w_conj(m))| over the plan, plus |Im w| on
/// self-conjugate rows.
double hermitian_defect(const SamplingPlan &plan, const CVector &w);

} // namespace envl0
