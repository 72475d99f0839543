#pragma once

#include "envl0/seismic.h"
#include "envl0/solvers.h"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace envl0 {

/// 10 log10(|orig|^2 / |orig - reco|^2); +inf when the error is exactly zero.
double snr(const Vector &orig, const Vector &reco);

/// Best snr over circular shifts of `reco` by at most `max_lag` samples.
double aligned_snr(const Vector &orig, const Vector &reco, int max_lag = 5, int *best_lag = nullptr);

struct NoiseSpec {
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Adds N(0, sigma^2) to the real and imaginary parts of every low-half
/// entry (real part only on self-conjugate rows) and mirrors conjugates.
CVector add_noise(const CVector &r, const SamplingPlan &plan, const NoiseSpec &spec);

struct ReportRow {
  std::string experiment;
  std::string case_id;
  int trial = 0;
  std::string method;
  double snr_db = 0;
  int iterations = 0;
  double wall_ms = 0;
  double beta = 0;
  double gamma = 0;
  std::uint64_t seed = 0;
};

/// Named signals behind a set of rows, for dumping (orig, reco) pairs.
struct SignalSet {
  std::string name;
  Vector t;
  std::vector<std::pair<std::string, Vector>> columns;
};

struct ExperimentReport {
  std::string id;
  std::vector<ReportRow> rows;
  std::vector<SignalSet> signals;
  std::vector<std::string> notes;

  std::vector<std::string> cases() const;
  std::vector<std::string> methods() const;
  /// Mean snr over trials; NaN if no row matches.
  double mean_snr(const std::string &case_id, const std::string &method) const;
  const ReportRow *find(const std::string &case_id, const std::string &method, int trial = 0) const;
};

/// Report CSV. Wall times are written as 0 unless `with_timing`, which keeps
/// the file byte-identical across runs.
void write_report_csv(std::ostream &os, const ExperimentReport &report, bool with_timing = false);
/// Case x method table of mean SNRs.
void print_summary(std::ostream &os, const ExperimentReport &report);

struct El0Pair {
  double beta;
  double gamma;
};

/// EL0M parameters published for the uniform-sampling Gaussian experiment,
/// keyed by f_max in {7.5, 6, 4.5, 3}.
El0Pair uniform_table_params(double f_max);

/// Shared setup of the Gaussian-derivative table experiments.
struct TableSetup {
  double T = 2.0;
  Index M = 129;
  double t0 = 1.0;
  double alpha = 200.0;
  int levels = 3;
  double f_min = 0.5;
  double tol = 1e-6;
  int max_iter = 100000;
  YUpdate y_update = YUpdate::closed_form;
  std::vector<double> l1_gammas{1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1, 1.0};
  /// Keep the reconstructed signals in the report.
  bool keep_signals = true;
};

struct Table2Options {
  TableSetup setup;
  std::vector<double> f_max{7.5, 6.0, 4.5, 3.0};
  std::optional<El0Pair> el0;     ///< overrides the published pair for every case
  std::optional<double> l1_gamma; ///< overrides the gamma sweep
};

struct Table1Options {
  TableSetup setup;
  std::vector<double> fractions{0.5, 0.4, 0.3, 0.2};
  /// Candidates are the grid frequencies in [f_min, f_cap].
  double f_cap = 15.0;
  int trials = 5;
  std::uint64_t seed = 2024;
  std::vector<El0Pair> el0_grid; ///< empty: beta in {0.01, 0.1} x beta/gamma in {0.1, 0.3, 0.5}
  std::optional<double> l1_gamma;
};

struct Table3Options {
  TableSetup setup;
  std::vector<double> sigmas{0.1, 0.3, 0.5};
  std::vector<double> f_max{7.5, 6.0, 4.5, 3.0};
  int trials = 5;
  std::uint64_t seed = 2024;
  /// Noisy cases keep the best grid point per trial for both methods. Empty:
  /// the published pair for f_max plus a fixed set of pairs.
  std::vector<El0Pair> el0_grid;
  /// Iteration cap for noisy cases; sigma = 0 uses setup.max_iter.
  int noisy_max_iter = 20000;
  std::optional<El0Pair> el0; ///< replaces the grid (and the sigma = 0 pair)
  std::optional<double> l1_gamma;
};

ExperimentReport run_table1(const Table1Options &opt);
ExperimentReport run_table2(const Table2Options &opt);
ExperimentReport run_table3(const Table3Options &opt);

enum class Scenario { ricker, gaussian };
enum class ModelingMode { fast, fd };

struct HomogeneousOptions {
  Scenario scenario = Scenario::ricker;
  ModelingMode mode = ModelingMode::fast;
  std::vector<double> f_max;
  double f_min = 1.0;
  double T = 1.344;
  Index M = 168;
  SourceWavelet wavelet = Ricker{25.0};
  int levels = 3;
  double velocity = 1500.0;
  std::pair<double, double> src{500.0, 1000.0};
  std::pair<double, double> rcv{1500.0, 1000.0};
  double extent = 2000.0;
  double h = 5.0;
  PmlSettings pml{};
  /// Data scales tried, in multiples of 4 pi r (so 1 means source units).
  std::vector<double> scale_factors{1.0};
  std::vector<El0Pair> el0_grid;
  std::vector<double> l1_gammas;
  double tol = 1e-6;
  int max_iter = 50000;
  int max_lag = 5;
};

HomogeneousOptions homogeneous_defaults(Scenario s);

/// Receiver spectrum converted to the point-source (3D) response, in fast
/// mode from the analytic Green's function and in FD mode from Helmholtz
/// solves scaled by green_3d / green_2d.
ReceiverSpectrum homogeneous_spectrum(const HomogeneousOptions &opt, const SamplingPlan &plan);

ExperimentReport run_homogeneous(const HomogeneousOptions &opt);

struct LayeredOptions {
  std::vector<double> f_max{30.0};
  double f_min = 1.0;
  double T = 2.24;
  Index M = 280;
  SourceWavelet wavelet = Ricker{25.0};
  int levels = 3;
  double h = 10.0;
  Index nx = 201, nz = 201;
  double z1 = 600.0, z2 = 1300.0;
  double v1 = 2000.0, v2 = 2500.0, v3 = 4000.0;
  std::pair<double, double> src{0.0, 1000.0};
  double receiver_spacing = 10.0;
  Index receiver_count = 201;
  PmlSettings pml{};
  El0Pair el0{1e-3, 1e-3 / 0.3};
  double l1_gamma = 1e-3;
  double tol = 1e-6;
  int max_iter = 5000;
  std::vector<std::string> methods{"idft", "l1m", "el0m"};
  std::vector<double> probes{200.0, 600.0, 1000.0, 1400.0, 1800.0};
  /// Runs the zero-contrast model (velocity v1 everywhere) for the checks.
  bool check_degenerate = true;
};

struct ArrivalCheck {
  double x;
  Index expected;
  Index measured;
};

struct LayeredResult {
  ExperimentReport report;
  /// Keyed by "fmax<f>/<method>".
  std::map<std::string, ShotRecord> records;
  std::vector<ArrivalCheck> arrivals;
  /// Smallest SNR between the degenerate FD record and the analytic record
  /// at the probes (IDFT traces).
  double degenerate_snr = std::numeric_limits<double>::quiet_NaN();
};

LayeredResult run_layered(const LayeredOptions &opt);

std::string format_fmax(double f);

} // namespace envl0
