// Command-line front end: selftest | solve | score | experiment <name> | helmholtz.

#include "selftest.h"

#include "envl0/evaluation.h"
#include "envl0/io.h"
#include "envl0/seismic.h"
#include "envl0/solvers.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

namespace fs = std::filesystem;
using namespace envl0;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2, kIo = 3 };

struct Common {
  std::string out = "out";
  bool timing = false;
};

struct SolveArgs {
  std::string input;
  Index M = 129;
  double T = 2.0;
  int levels = 3;
  std::string method = "el0m";
  double beta = 0.01, gamma = 0.0202;
  double tol = 1e-6;
  int max_iter = 100000;
  std::string scale = "samples";
  bool inner_loop = false;
  bool allow_inadmissible = false;
  bool allow_nonconverged = false;
  bool svg = true;
};

struct ScoreArgs {
  std::string input, reference;
  int max_lag = 0;
};

struct ExperimentArgs {
  std::string name;
  std::vector<double> fmax;
  std::uint64_t seed = 2024;
  std::vector<double> sigma;
  int trials = 5;
  std::string mode = "fast";
  std::vector<std::string> method;
  double z1 = 600, z2 = 1300;
  int levels = 0;
};

struct HelmholtzArgs {
  double f = 10.0;
  double v = 1500.0;
  std::string model = "homogeneous";
  double z1 = 600, z2 = 1300, v1 = 2000, v2 = 2500, v3 = 4000;
  double h = 10.0;
  double extent = 2000.0;
  double sx = 1000.0, sz = 1000.0;
  double amplitude = 1.0;
  int pml = 20;
  bool allow_coarse = false;
};

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

Vector time_axis(const TimeGrid &g) {
  Vector t(g.samples());
  for (Index n = 0; n < g.samples(); ++n)
    t[n] = g.time(n);
  return t;
}

// ---------------------------------------------------------------------------

int cmd_selftest(bool inject_fault) {
  FilterBank filters = piecewise_linear_filters();
  if (inject_fault)
    filters[1][2] = -filters[1][2];
  auto ops = cli::operator_suite(filters, std::cout);
  std::cout << "operators: " << ops.passed << "/" << ops.total << " passed\n";
  auto prox = cli::prox_suite(std::cout);
  std::cout << "prox: " << prox.passed << "/" << prox.total << " passed\n";
  return ops.ok() && prox.ok() ? kOk : kNumerical;
}

CVector read_measurements(const std::string &path, Index M, SamplingPlan &plan) {
  CsvTable t = read_csv(path);
  auto rows = t.numeric("row_index");
  auto re = t.numeric("re");
  auto im = t.numeric("im");
  std::map<Index, Complex> values;
  for (size_t i = 0; i < rows.size(); ++i) {
    double rr = rows[i];
    if (rr != std::floor(rr))
      throw IoError(path + ": row_index must be an integer");
    auto m = static_cast<Index>(rr);
    if (!values.emplace(m, Complex(re[i], im[i])).second)
      throw DomainError(path + ": duplicate row " + std::to_string(m));
  }
  std::vector<Index> given;
  for (const auto &kv : values)
    given.push_back(kv.first);
  plan = SamplingPlan::closure_of(M, given);
  CVector r(plan.size());
  for (Index m : plan.rows()) {
    Index c = plan.conjugate_row(m);
    auto it = values.find(m);
    Complex v = it != values.end() ? it->second : std::conj(values.at(c));
    if (it != values.end() && values.count(c) && std::abs(values.at(c) - std::conj(v)) > 1e-12 * std::max(1.0, std::abs(v)))
      throw DomainError(path + ": rows " + std::to_string(m) + " and " + std::to_string(c) + " are not conjugate");
    r[plan.position(m)] = v;
  }
  return r;
}

int cmd_solve(const SolveArgs &a, const Common &c) {
  if (a.input.empty())
    throw DomainError("solve: --input is required");
  TimeGrid grid(a.T, a.M);
  SamplingPlan plan = SamplingPlan::full(a.M);
  CVector r = read_measurements(a.input, a.M, plan);
  FrameletSystem fr(a.M, a.levels);
  ScalePolicy scale;
  if (a.scale == "samples")
    scale.kind = DataScale::samples;
  else if (a.scale == "peak")
    scale.kind = DataScale::peak;
  else if (a.scale != "lambda")
    throw DomainError("solve: --scale must be lambda, samples or peak");

  ensure_dir(c.out);
  Vector u;
  bool converged = true;
  int iterations = 0;
  if (a.method == "idft") {
    u = reconstruct(r, plan, grid, fr, IdftMethod{}).samples;
  } else if (a.method == "l1m") {
    Reconstruction rec = reconstruct(r, plan, grid, fr, L1mMethod{a.gamma, a.tol, a.max_iter}, scale);
    u = rec.samples;
    converged = rec.converged;
    iterations = rec.iterations;
  } else if (a.method == "el0m") {
    // Solved directly so the full trace can be written.
    SolverConfig cfg(RegParams(a.beta, a.gamma));
    cfg.tol = a.tol;
    cfg.max_iter = a.max_iter;
    cfg.y_update = a.inner_loop ? YUpdate::inner_loop : YUpdate::closed_form;
    cfg.allow_inadmissible = a.allow_inadmissible;
    double s = 1.0;
    Vector idft = reconstruct(r, plan, grid, fr, IdftMethod{}).samples;
    if (scale.kind == DataScale::samples)
      s = 1.0 / grid.lambda();
    else if (scale.kind == DataScale::peak && idft.cwiseAbs().maxCoeff() > 0)
      s = 1.0 / (grid.lambda() * idft.cwiseAbs().maxCoeff());
    MeasurementOperator op(FourierSpec(a.M), plan, fr);
    El0mResult res = el0m_solve(op, r * s, cfg);
    u = fr.synthesis(res.y) / (s * grid.lambda());
    converged = res.trace.converged;
    iterations = res.trace.iterations;
    std::ofstream os(fs::path(c.out) / "trace.csv", std::ios::binary);
    if (!os)
      throw IoError("cannot write trace.csv");
    write_trace_csv(os, res.trace);
  } else {
    throw DomainError("solve: --method must be el0m, l1m or idft");
  }
  write_columns(fs::path(c.out) / "reconstruction.csv", {"t", "u"}, {time_axis(grid), u});
  if (a.svg)
    write_svg(fs::path(c.out) / "reconstruction.svg", a.method + " reconstruction", time_axis(grid), {{a.method, u}});
  std::cout << "method " << a.method << ", rows " << plan.size() << ", iterations " << iterations
            << (converged ? ", converged" : ", NOT converged") << '\n';
  if (!converged && !a.allow_nonconverged) {
    std::cerr << "error: solver did not converge within --max-iter (use --allow-nonconverged)\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_score(const ScoreArgs &a) {
  if (a.input.empty() || a.reference.empty())
    throw DomainError("score: --input and --reference are required");
  auto reco = read_csv(a.input).numeric("u");
  auto ref = read_csv(a.reference).numeric("u");
  if (reco.size() != ref.size())
    throw DimensionError("score: input has " + std::to_string(reco.size()) + " samples, reference " +
                         std::to_string(ref.size()));
  Vector u = Eigen::Map<Vector>(reco.data(), static_cast<Index>(reco.size()));
  Vector o = Eigen::Map<Vector>(ref.data(), static_cast<Index>(ref.size()));
  double v = a.max_lag > 0 ? aligned_snr(o, u, a.max_lag) : snr(o, u);
  std::cout << "snr_db " << format_double(v) << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------

void write_report(const ExperimentReport &rep, const Common &c) {
  ensure_dir(c.out);
  std::ostringstream csv;
  write_report_csv(csv, rep, c.timing);
  write_text(fs::path(c.out) / (rep.id + "_report.csv"), csv.str());
  for (const auto &sig : rep.signals) {
    std::vector<std::string> names{"t"};
    std::vector<Vector> cols{sig.t};
    std::vector<SvgSeries> series;
    for (const auto &[name, v] : sig.columns) {
      names.push_back(name);
      cols.push_back(v);
      series.push_back({name, v});
    }
    write_columns(fs::path(c.out) / (sig.name + ".csv"), names, cols);
    write_svg(fs::path(c.out) / (sig.name + ".svg"), sig.name, sig.t, series);
  }
  print_summary(std::cout, rep);
}

// Measurement and reference files for the uniform experiment, consumable by
// `solve` and `score`.
void dump_table2_inputs(const Table2Options &opt, const Common &c) {
  const TableSetup &s = opt.setup;
  TimeGrid grid(s.T, s.M);
  for (double f : opt.f_max) {
    SamplingPlan plan = build_band_plan(s.M, s.T, s.f_min, f);
    ReceiverSpectrum sp;
    for (Index m : plan.low_half_rows())
      sp[m] = gaussian_deriv_ft(grid.frequency(m), s.t0, s.alpha);
    CVector r = assemble_measurements(sp, plan, grid);
    CsvTable t;
    t.header = {"row_index", "re", "im"};
    for (Index i = 0; i < plan.size(); ++i)
      t.rows.push_back({std::to_string(plan.rows()[static_cast<size_t>(i)]), format_double(r[i].real()),
                        format_double(r[i].imag())});
    write_csv(fs::path(c.out) / ("table2_measurements_fmax" + format_fmax(f) + ".csv"), t);
  }
  write_columns(fs::path(c.out) / "table2_reference.csv", {"t", "u"},
                {time_axis(grid), sample_periodic(GaussianDeriv{s.t0, s.alpha}, grid)});
}

int cmd_experiment(const ExperimentArgs &a, const Common &c) {
  const std::string &n = a.name;
  if (n == "table1") {
    Table1Options o;
    o.seed = a.seed;
    o.trials = a.trials;
    if (a.levels)
      o.setup.levels = a.levels;
    write_report(run_table1(o), c);
  } else if (n == "table2") {
    Table2Options o;
    if (!a.fmax.empty())
      o.f_max = a.fmax;
    if (a.levels)
      o.setup.levels = a.levels;
    write_report(run_table2(o), c);
    dump_table2_inputs(o, c);
  } else if (n == "table3") {
    Table3Options o;
    o.seed = a.seed;
    o.trials = a.trials;
    if (!a.sigma.empty())
      o.sigmas = a.sigma;
    if (!a.fmax.empty())
      o.f_max = a.fmax;
    if (a.levels)
      o.setup.levels = a.levels;
    write_report(run_table3(o), c);
  } else if (n == "homogeneous-ricker" || n == "homogeneous-gaussian") {
    HomogeneousOptions o = homogeneous_defaults(n == "homogeneous-ricker" ? Scenario::ricker : Scenario::gaussian);
    if (a.mode == "fd")
      o.mode = ModelingMode::fd;
    else if (a.mode != "fast")
      throw DomainError("--mode must be fast or fd");
    if (!a.fmax.empty())
      o.f_max = a.fmax;
    if (a.levels)
      o.levels = a.levels;
    write_report(run_homogeneous(o), c);
  } else if (n == "layered") {
    LayeredOptions o;
    if (!a.fmax.empty())
      o.f_max = a.fmax;
    if (!a.method.empty())
      o.methods = a.method;
    if (a.levels)
      o.levels = a.levels;
    o.z1 = a.z1;
    o.z2 = a.z2;
    LayeredResult res = run_layered(o);
    write_report(res.report, c);
    for (const auto &[key, rec] : res.records) {
      std::string stem = "layered_" + key;
      std::replace(stem.begin(), stem.end(), '/', '_');
      write_pgm(fs::path(c.out) / (stem + ".pgm"), rec.data);
      write_grid_csv(fs::path(c.out) / (stem + ".csv"), rec.data);
    }
    bool ok = true;
    for (const auto &arr : res.arrivals)
      ok = ok && arr.measured >= 0 && std::abs(arr.measured - arr.expected) <= 3;
    if (!res.arrivals.empty() && !ok) {
      std::cerr << "error: first-arrival check failed on the zero-contrast model\n";
      return kNumerical;
    }
  } else {
    throw DomainError("unknown experiment '" + n +
                      "' (table1, table2, table3, homogeneous-ricker, homogeneous-gaussian, layered)");
  }
  return kOk;
}

int cmd_helmholtz(const HelmholtzArgs &a, const Common &c) {
  const auto n = static_cast<Index>(std::llround(a.extent / a.h)) + 1;
  VelocityModel model = a.model == "homogeneous" ? VelocityModel::homogeneous(n, n, a.h, a.v)
                        : a.model == "layered"
                            ? VelocityModel::three_layer(n, n, a.h, a.z1, a.z2, a.v1, a.v2, a.v3)
                            : throw DomainError("--model must be homogeneous or layered");
  HelmholtzProblem p{model, a.f, a.sx, a.sz, Complex(a.amplitude, 0.0), PmlSettings{a.pml}, a.allow_coarse};
  HelmholtzField field = helmholtz_solve(p);
  ensure_dir(c.out);
  Eigen::MatrixXcd in = field.interior();
  write_grid_csv(fs::path(c.out) / "field_re.csv", in.real());
  write_grid_csv(fs::path(c.out) / "field_im.csv", in.imag());
  write_pgm_magnitude(fs::path(c.out) / "field_mag.pgm", in.cwiseAbs());
  std::cout << "grid " << n << " x " << n << " (+" << a.pml << " PML cells per side), kappa h "
            << 2 * std::numbers::pi * a.f * a.h / model.min_velocity() << ", residual " << field.relative_residual
            << '\n';
  if (a.model == "homogeneous" && a.amplitude != 0.0) {
    GreenComparison g = compare_with_green(field, p);
    std::cout << "Green's function check over " << g.receivers << " nodes: max relative magnitude error "
              << g.max_magnitude_error << ", max phase error " << g.max_phase_error << " rad\n";
  }
  return kOk;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Incomplete-Fourier seismic reconstruction with the l0 Moreau envelope"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI/TOML file with defaults; flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("--out", common.out, "Output directory")->capture_default_str();
  };

  bool inject = false;
  auto *st = app.add_subcommand("selftest", "Operator-identity and prox-oracle suites");
  st->add_flag("--inject-filter-fault", inject)->group("");

  SolveArgs sa;
  auto *so = app.add_subcommand("solve", "Reconstruct a signal from a measurement CSV (row_index,re,im)");
  add_common(so);
  so->add_option("--input", sa.input, "Measurement CSV")->required();
  so->add_option("--M", sa.M, "Sample count")->capture_default_str();
  so->add_option("--T", sa.T, "Record length (s)")->capture_default_str();
  so->add_option("--levels,--l", sa.levels, "Framelet levels")->capture_default_str();
  so->add_option("--method", sa.method, "el0m | l1m | idft")->capture_default_str();
  so->add_option("--beta", sa.beta)->capture_default_str();
  so->add_option("--gamma", sa.gamma)->capture_default_str();
  so->add_option("--tol", sa.tol)->capture_default_str();
  so->add_option("--max-iter", sa.max_iter)->capture_default_str();
  so->add_option("--scale", sa.scale, "Data units seen by the solver: lambda | samples | peak")->capture_default_str();
  so->add_flag("--inner-loop", sa.inner_loop, "Inner iteration instead of the closed-form y update");
  so->add_flag("--allow-inadmissible", sa.allow_inadmissible);
  so->add_flag("--allow-nonconverged", sa.allow_nonconverged);

  ScoreArgs sc;
  auto *scs = app.add_subcommand("score", "SNR of a reconstruction CSV against a reference CSV (columns t,u)");
  scs->add_option("--input", sc.input)->required();
  scs->add_option("--reference", sc.reference)->required();
  scs->add_option("--max-lag", sc.max_lag, "Best circular shift within this many samples")->capture_default_str();

  ExperimentArgs ea;
  auto *ex = app.add_subcommand("experiment", "Run a named experiment and write its report");
  add_common(ex);
  ex->add_option("name", ea.name, "table1 | table2 | table3 | homogeneous-ricker | homogeneous-gaussian | layered")
      ->required();
  ex->add_option("--fmax", ea.fmax, "Band upper limits (comma separated)")->delimiter(',');
  ex->add_option("--seed", ea.seed)->capture_default_str();
  ex->add_option("--sigma", ea.sigma, "Noise levels (comma separated)")->delimiter(',');
  ex->add_option("--trials", ea.trials)->capture_default_str();
  ex->add_option("--mode", ea.mode, "fast | fd")->capture_default_str();
  ex->add_option("--method", ea.method, "Layered methods: idft,l1m,el0m")->delimiter(',');
  ex->add_option("--levels,--l", ea.levels, "Framelet levels (0 keeps the experiment default)");
  ex->add_option("--z1", ea.z1)->capture_default_str();
  ex->add_option("--z2", ea.z2)->capture_default_str();
  ex->add_flag("--timing", common.timing, "Write wall times into the report CSV");

  HelmholtzArgs ha;
  auto *hz = app.add_subcommand("helmholtz", "Single-frequency field dump");
  hz->set_help_flag("--help", "Print this help message and exit");
  add_common(hz);
  hz->add_option("--f", ha.f, "Frequency (Hz)")->capture_default_str();
  hz->add_option("--v", ha.v, "Homogeneous velocity (m/s)")->capture_default_str();
  hz->add_option("--model", ha.model, "homogeneous | layered")->capture_default_str();
  hz->add_option("--z1", ha.z1)->capture_default_str();
  hz->add_option("--z2", ha.z2)->capture_default_str();
  hz->add_option("--v1", ha.v1)->capture_default_str();
  hz->add_option("--v2", ha.v2)->capture_default_str();
  hz->add_option("--v3", ha.v3)->capture_default_str();
  hz->add_option("--h", ha.h, "Grid spacing (m)")->capture_default_str();
  hz->add_option("--extent", ha.extent, "Side of the square physical domain (m)")->capture_default_str();
  hz->add_option("--sx", ha.sx)->capture_default_str();
  hz->add_option("--sz", ha.sz)->capture_default_str();
  hz->add_option("--amplitude", ha.amplitude)->capture_default_str();
  hz->add_option("--pml", ha.pml, "PML width (cells)")->capture_default_str();
  hz->add_flag("--allow-coarse", ha.allow_coarse, "Skip the kappa h <= 1 guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    CLI::App *sub = app.get_subcommands().front();
    if (sub != st && sub != scs) {
      ensure_dir(common.out);
      write_text(fs::path(common.out) / "effective_config.ini", app.config_to_str(true, true));
    }
    if (sub == st)
      return cmd_selftest(inject);
    if (sub == so)
      return cmd_solve(sa, common);
    if (sub == scs)
      return cmd_score(sc);
    if (sub == ex)
      return cmd_experiment(ea, common);
    return cmd_helmholtz(ha, common);
  } catch (const IoError &e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError &e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
