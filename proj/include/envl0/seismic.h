#pragma once

#include "envl0/operators.h"
#include "envl0/solvers.h"
#include "envl0/types.h"

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

namespace envl0 {

/// Record length T and sample count M. lambda = T/M, delta_f = 1/T.
class TimeGrid {
public:
  TimeGrid(double record_length, Index samples);

  double record_length() const { return T_; }
  Index samples() const { return M_; }
  double lambda() const { return T_ / static_cast<double>(M_); }
  double delta_f() const { return 1.0 / T_; }
  double time(Index n) const { return lambda() * static_cast<double>(n); }
  double frequency(Index row) const { return static_cast<double>(row - 1) / T_; }

private:
  double T_;
  Index M_;
};

struct Ricker {
  double f0;
};

struct GaussianDeriv {
  double t0;
  double alpha;
};

using SourceWavelet = std::variant<Ricker, GaussianDeriv>;

void validate(const SourceWavelet &w);

double ricker(double t, double f0);
double gaussian_deriv(double t, double t0, double alpha);
Complex gaussian_deriv_ft(double f, double t0, double alpha);
double evaluate(const SourceWavelet &w, double t);

/// Samples the T-periodic extension of w at t_n = lambda n, shifted by
/// `delay` seconds. Wavelets centred near t = 0 wrap to the end of the record.
Vector sample_periodic(const SourceWavelet &w, const TimeGrid &grid, double delay = 0.0);

/// lambda sum_n u_n exp(-2 pi i f lambda n).
Complex quadrature_ft(const Vector &samples, const TimeGrid &grid, double f);

/// Free-space Green's function of -Delta - kappa^2 in 2D, outgoing under the
/// exp(-2 pi i f t) transform: (-i/4) H0^(2)(kappa r).
Complex green_2d(double kappa, double r);
/// Free-space Green's function in 3D: exp(-i kappa r) / (4 pi r).
Complex green_3d(double kappa, double r);

class VelocityModel {
public:
  /// Nodes at x = j h, z = i h for 0 <= j < nx, 0 <= i < nz.
  VelocityModel(Index nx, Index nz, double h, Eigen::MatrixXd velocity);

  static VelocityModel homogeneous(Index nx, Index nz, double h, double v);
  /// Velocity v1 above z1, v2 on [z1, z2), v3 below.
  static VelocityModel three_layer(Index nx, Index nz, double h, double z1, double z2, double v1, double v2,
                                   double v3);

  Index nx() const { return nx_; }
  Index nz() const { return nz_; }
  double h() const { return h_; }
  const Eigen::MatrixXd &velocity() const { return v_; }
  double min_velocity() const { return v_.minCoeff(); }
  /// Nearest grid node (row, column) to a physical point; throws if outside.
  std::pair<Index, Index> node(double x, double z) const;

private:
  Index nx_, nz_;
  double h_;
  Eigen::MatrixXd v_;
};

struct PmlSettings {
  int width = 20;
  /// sigma_max = strength * v_max / (width * h), quadratic profile, v_max the
  /// largest model velocity.
  double strength = 1.5 * 6.907755278982137;
};

struct HelmholtzProblem {
  VelocityModel model;
  double frequency;
  double src_x, src_z;
  Complex amplitude{1.0, 0.0};
  PmlSettings pml{};
  /// Skip the kappa h <= 1 resolution guard.
  bool allow_coarse = false;
};

/// Field on the grid extended by the PML on all sides.
struct HelmholtzField {
  Eigen::MatrixXcd values;
  int pml = 0;
  double h = 0;
  double relative_residual = 0;

  Eigen::MatrixXcd interior() const;
  /// Value at an interior node (row, column).
  Complex at(Index i, Index j) const { return values(i + pml, j + pml); }
};

/// Sixth-order (fourth where kappa varies) compact discretization of -Delta u - kappa^2 u in the
/// physical region, second-order stretched-coordinate form in the PML.
/// The assembled matrix is complex symmetric.
class HelmholtzSolver {
public:
  HelmholtzSolver(VelocityModel model, PmlSettings pml = {});
  ~HelmholtzSolver();
  HelmholtzSolver(HelmholtzSolver &&) noexcept;
  HelmholtzSolver &operator=(HelmholtzSolver &&) noexcept;

  const VelocityModel &model() const { return model_; }
  const PmlSettings &pml() const { return pml_; }
  double resolution(double frequency) const; ///< kappa h at the slowest velocity

  /// Factorizes for one frequency; subsequent solve() calls reuse it.
  void factorize(double frequency, bool allow_coarse = false);
  /// Point sources at interior nodes: grid delta 1/h^2, scaled so the far field
  /// of a single source carries no discretization gain.
  HelmholtzField solve(const std::vector<std::pair<std::pair<Index, Index>, Complex>> &sources) const;

private:
  struct Impl;
  VelocityModel model_;
  PmlSettings pml_;
  std::unique_ptr<Impl> impl_;
};

HelmholtzField helmholtz_solve(const HelmholtzProblem &problem);

struct GreenComparison {
  Index receivers = 0;
  double max_magnitude_error = 0; ///< relative
  double max_phase_error = 0;     ///< radians
};

/// Compares a homogeneous-model field with amplitude * green_2d at interior
/// nodes at least `min_source_distance` from the source and `min_pml_distance`
/// from the absorbing layer.
GreenComparison compare_with_green(const HelmholtzField &field, const HelmholtzProblem &problem,
                                   double min_source_distance = 300.0, double min_pml_distance = 200.0);

struct Seismogram {
  double rx = 0, rz = 0;
  TimeGrid grid;
  Vector samples;
};

struct ShotRecord {
  std::vector<std::pair<double, double>> receivers;
  TimeGrid grid;
  Eigen::MatrixXd data; ///< M x n_receivers
};

/// (1 / (4 pi r)) q(t - r/v), sampled with the periodic convention.
Seismogram dalembert_seismogram(double v, const SourceWavelet &source, std::pair<double, double> src,
                                std::pair<double, double> rcv, const TimeGrid &grid);

/// Receiver spectrum keyed by low-half plan row.
using ReceiverSpectrum = std::map<Index, Complex>;

/// Places u(f) / sqrt(M) at low-half rows and conjugates at mirrored rows.
CVector assemble_measurements(const ReceiverSpectrum &values, const SamplingPlan &plan, const TimeGrid &grid);

struct IdftMethod {};
struct L1mMethod {
  double gamma;
  double tol = 1e-6;
  int max_iter = 5000;
};
struct El0mMethod {
  SolverConfig config;
};
using Method = std::variant<IdftMethod, L1mMethod, El0mMethod>;

/// Scale s applied to r before the solver sees it. The solver recovers
/// coefficients y of s * lambda * u, so the returned signal is W* y / (s lambda).
enum class DataScale {
  lambda,  ///< s = a: v = a lambda u
  samples, ///< s = a/lambda: v = a u
  peak,    ///< s = a/(lambda p), p = max |u_idft|: v = a u / p
};

struct ScalePolicy {
  DataScale kind = DataScale::lambda;
  double value = 1.0; ///< the factor a above
};

struct Reconstruction {
  Vector samples;
  int iterations = 0;
  bool converged = true;
  double scale = 1.0; ///< s
  std::optional<TraceAudit> audit;
};

Reconstruction reconstruct(const CVector &r, const SamplingPlan &plan, const TimeGrid &grid,
                           const FrameletSystem &framelet, const Method &method,
                           ScalePolicy scale = {});

Seismogram reconstruct_seismogram(const CVector &r, const SamplingPlan &plan, const TimeGrid &grid,
                                  const FrameletSystem &framelet, const Method &method,
                                  ScalePolicy scale = {});

/// Per-frequency Helmholtz solves for one source; values at every receiver,
/// keyed by low-half plan row. Receivers snap to the nearest node.
std::vector<ReceiverSpectrum> model_receiver_spectra(const VelocityModel &model, const SourceWavelet &source,
                                                     std::pair<double, double> src,
                                                     const std::vector<std::pair<double, double>> &receivers,
                                                     const TimeGrid &grid, const SamplingPlan &plan,
                                                     const PmlSettings &pml = {}, bool allow_coarse = false);

ShotRecord generate_shot_record(const VelocityModel &model, const SourceWavelet &source,
                                std::pair<double, double> src,
                                const std::vector<std::pair<double, double>> &receivers, const TimeGrid &grid,
                                const SamplingPlan &plan, const FrameletSystem &framelet, const Method &method,
                                ScalePolicy scale = {DataScale::peak, 1.0}, const PmlSettings &pml = {});

/// Assembles a record from precomputed spectra; lets several methods share
/// one set of Helmholtz solves.
ShotRecord shot_record_from_spectra(const std::vector<ReceiverSpectrum> &spectra,
                                    const std::vector<std::pair<double, double>> &receivers, const TimeGrid &grid,
                                    const SamplingPlan &plan, const FrameletSystem &framelet, const Method &method,
                                    ScalePolicy scale = {DataScale::peak, 1.0});

/// First sample whose magnitude exceeds `fraction` of the trace maximum, or -1.
Index first_arrival(const Vector &trace, double fraction = 0.1);
/// First local maximum of |trace| at or after first_arrival; the onset of a
/// zero-phase wavelet is its peak.
Index first_peak(const Vector &trace, double fraction = 0.1);

} // namespace envl0
