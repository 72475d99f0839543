#include "envl0/evaluation.h"

#include <algorithm>
#include <chrono>
#include <map>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace envl0 {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Outcome {
  Vector u;
  int iterations = 0;
  double ms = 0;
};

// Measurements of the Gaussian derivative in sample units: r = G(f) / (lambda sqrt(M)).
CVector table_data(const TableSetup &s, const TimeGrid &grid, const SamplingPlan &plan) {
  ReceiverSpectrum sp;
  for (Index m : plan.low_half_rows())
    sp[m] = gaussian_deriv_ft(grid.frequency(m), s.t0, s.alpha);
  return assemble_measurements(sp, plan, grid) / grid.lambda();
}

Outcome table_el0m(const MeasurementOperator &op, const CVector &r, El0Pair p, const TableSetup &s,
                   const std::string &where) {
  SolverConfig cfg(RegParams(p.beta, p.gamma));
  cfg.tol = s.tol;
  cfg.max_iter = s.max_iter;
  cfg.y_update = s.y_update;
  auto t0 = Clock::now();
  El0mResult res = el0m_solve(op, r, cfg);
  TraceAudit audit = audit_trace(res, cfg);
  if (!audit.ok())
    throw NumericalError(where + ": EL0M trace violates its invariants");
  Outcome out{op.framelet().synthesis(res.y), res.trace.iterations, 0};
  out.ms = ms_since(t0);
  return out;
}

Outcome table_l1m(const MeasurementOperator &op, const CVector &r, double gamma, const TableSetup &s) {
  auto t0 = Clock::now();
  L1mResult res = l1m_solve(op, r, gamma, s.tol, s.max_iter);
  Outcome out{op.framelet().synthesis(res.y), res.trace.iterations, 0};
  out.ms = ms_since(t0);
  return out;
}

ReportRow make_row(const std::string &exp, const std::string &case_id, int trial, const std::string &method,
                   double snr_db, const Outcome &o, double beta, double gamma, std::uint64_t seed) {
  return ReportRow{exp, case_id, trial, method, snr_db, o.iterations, o.ms, beta, gamma, seed};
}

Vector time_axis(const TimeGrid &g) {
  Vector t(g.samples());
  for (Index n = 0; n < g.samples(); ++n)
    t[n] = g.time(n);
  return t;
}

std::vector<double> gammas_for(const TableSetup &s, const std::optional<double> &fixed) {
  if (fixed)
    return {*fixed};
  if (s.l1_gammas.empty())
    throw DomainError("L1M gamma grid is empty");
  return s.l1_gammas;
}

std::vector<El0Pair> table1_grid() {
  std::vector<El0Pair> out;
  for (double beta : {0.01, 0.1})
    for (double ratio : {0.1, 0.3, 0.5})
      out.push_back({beta, beta / ratio});
  return out;
}

std::vector<El0Pair> table3_grid(double f_max) {
  return {uniform_table_params(f_max), {0.1, 1.0}, {0.03, 0.1}, {0.3, 1.0}, {1.0, 2.0}, {0.01, 0.02}};
}

struct Pick {
  Outcome el, l1;
  double el_snr = -std::numeric_limits<double>::infinity();
  double l1_snr = -std::numeric_limits<double>::infinity();
  El0Pair pair{0, 0};
  double gamma = 0;
};

// Best grid point of each method on one problem instance.
Pick best_of_grid(const MeasurementOperator &op, const CVector &r, const Vector &u,
                  const std::vector<El0Pair> &el_grid, const std::vector<double> &gammas, const TableSetup &s,
                  const std::string &where) {
  Pick out;
  for (const El0Pair &cand : el_grid) {
    Outcome o = table_el0m(op, r, cand, s, where);
    double v = snr(u, o.u);
    if (v > out.el_snr) {
      out.el_snr = v;
      out.el = std::move(o);
      out.pair = cand;
    }
  }
  for (double g : gammas) {
    Outcome o = table_l1m(op, r, g, s);
    double v = snr(u, o.u);
    if (v > out.l1_snr) {
      out.l1_snr = v;
      out.l1 = std::move(o);
      out.gamma = g;
    }
  }
  return out;
}

std::string picks_note(const std::string &case_id, const std::vector<Pick> &picks) {
  std::map<std::string, int> n;
  for (const Pick &p : picks) {
    ++n["EL0M (" + num(p.pair.beta) + "," + num(p.pair.gamma) + ")"];
    ++n["L1M " + num(p.gamma)];
  }
  std::ostringstream note;
  note << case_id << ": picks";
  for (const auto &[k, c] : n)
    note << ' ' << k << " x" << c;
  return note.str();
}

} // namespace

El0Pair uniform_table_params(double f_max) {
  struct Entry {
    double f, beta, gamma;
  };
  static const Entry table[] = {{7.5, 0.0100, 0.0202}, {6.0, 1.9000, 3.1053}, {4.5, 0.6400, 1.0460}, {3.0, 0.3800, 0.6211}};
  for (const auto &e : table)
    if (std::abs(e.f - f_max) < 1e-9)
      return {e.beta, e.gamma};
  throw DomainError("no published EL0M parameters for f_max = " + num(f_max));
}

// ---------------------------------------------------------------------------

ExperimentReport run_table2(const Table2Options &opt) {
  const TableSetup &s = opt.setup;
  TimeGrid grid(s.T, s.M);
  FourierSpec spec(s.M);
  FrameletSystem fr(s.M, s.levels);
  const Vector u = sample_periodic(GaussianDeriv{s.t0, s.alpha}, grid);

  ExperimentReport rep;
  rep.id = "table2";
  for (double f : opt.f_max) {
    const std::string case_id = "fmax" + num(f);
    SamplingPlan plan = build_band_plan(s.M, s.T, s.f_min, f);
    MeasurementOperator op(spec, plan, fr);
    CVector r = table_data(s, grid, plan);

    El0Pair p = opt.el0 ? *opt.el0 : uniform_table_params(f);
    Outcome el = table_el0m(op, r, p, s, "table2 " + case_id);
    rep.rows.push_back(make_row("table2", case_id, 1, "el0m", snr(u, el.u), el, p.beta, p.gamma, 0));

    Outcome best;
    double best_snr = -std::numeric_limits<double>::infinity(), best_gamma = 0;
    for (double g : gammas_for(s, opt.l1_gamma)) {
      Outcome o = table_l1m(op, r, g, s);
      double v = snr(u, o.u);
      if (v > best_snr) {
        best_snr = v;
        best = std::move(o);
        best_gamma = g;
      }
    }
    rep.rows.push_back(make_row("table2", case_id, 1, "l1m", best_snr, best, 0.0, best_gamma, 0));
    rep.notes.push_back(case_id + ": EL0M beta=" + num(p.beta) + " gamma=" + num(p.gamma) + " (" +
                        std::to_string(el.iterations) + " it), L1M gamma=" + num(best_gamma));
    if (s.keep_signals)
      rep.signals.push_back({"table2_" + case_id, time_axis(grid), {{"orig", u}, {"el0m", el.u}, {"l1m", best.u}}});
  }
  return rep;
}

ExperimentReport run_table3(const Table3Options &opt) {
  const TableSetup &s = opt.setup;
  if (opt.trials < 1)
    throw DomainError("table3: trials must be at least 1");
  if (opt.noisy_max_iter < 1)
    throw DomainError("table3: noisy_max_iter must be at least 1");
  TimeGrid grid(s.T, s.M);
  FourierSpec spec(s.M);
  FrameletSystem fr(s.M, s.levels);
  const Vector u = sample_periodic(GaussianDeriv{s.t0, s.alpha}, grid);
  TableSetup noisy = s;
  noisy.max_iter = opt.noisy_max_iter;

  ExperimentReport rep;
  rep.id = "table3";
  for (double sigma : opt.sigmas) {
    if (!(sigma >= 0))
      throw DomainError("table3: sigma must be non-negative");
    for (double f : opt.f_max) {
      const std::string case_id = "sigma" + num(sigma) + "_fmax" + num(f);
      SamplingPlan plan = build_band_plan(s.M, s.T, s.f_min, f);
      MeasurementOperator op(spec, plan, fr);
      const CVector clean = table_data(s, grid, plan);
      std::vector<Pick> picks;

      if (sigma == 0.0) {
        // Noise-free data: the exact-data protocol, one solve for every trial.
        El0Pair p = opt.el0 ? *opt.el0 : uniform_table_params(f);
        picks.push_back(best_of_grid(op, clean, u, {p}, gammas_for(s, opt.l1_gamma), s, "table3 " + case_id));
      } else {
        std::vector<El0Pair> el_grid = opt.el0 ? std::vector<El0Pair>{*opt.el0}
                                               : (opt.el0_grid.empty() ? table3_grid(f) : opt.el0_grid);
        for (int t = 1; t <= opt.trials; ++t) {
          std::uint64_t seed = opt.seed ^ static_cast<std::uint64_t>(t);
          CVector r = add_noise(clean, plan, NoiseSpec{sigma, seed});
          picks.push_back(best_of_grid(op, r, u, el_grid, gammas_for(s, opt.l1_gamma), noisy, "table3 " + case_id));
        }
      }
      for (int t = 1; t <= opt.trials; ++t) {
        const Pick &pk = picks[std::min(static_cast<size_t>(t), picks.size()) - 1];
        std::uint64_t seed = opt.seed ^ static_cast<std::uint64_t>(t);
        rep.rows.push_back(make_row("table3", case_id, t, "el0m", pk.el_snr, pk.el, pk.pair.beta, pk.pair.gamma, seed));
        rep.rows.push_back(make_row("table3", case_id, t, "l1m", pk.l1_snr, pk.l1, 0.0, pk.gamma, seed));
      }
      rep.notes.push_back(picks_note(case_id, picks));
      if (s.keep_signals)
        rep.signals.push_back(
            {"table3_" + case_id, time_axis(grid), {{"orig", u}, {"el0m", picks[0].el.u}, {"l1m", picks[0].l1.u}}});
    }
  }
  return rep;
}

ExperimentReport run_table1(const Table1Options &opt) {
  const TableSetup &s = opt.setup;
  if (opt.trials < 1)
    throw DomainError("table1: trials must be at least 1");
  TimeGrid grid(s.T, s.M);
  FourierSpec spec(s.M);
  FrameletSystem fr(s.M, s.levels);
  const Vector u = sample_periodic(GaussianDeriv{s.t0, s.alpha}, grid);

  std::vector<Index> candidates;
  for (Index m = 2; 2 * (m - 1) <= s.M; ++m) {
    double f = grid.frequency(m);
    if (f >= s.f_min - 1e-9 && f <= opt.f_cap + 1e-9)
      candidates.push_back(m);
  }
  const std::vector<El0Pair> grid_el0 = opt.el0_grid.empty() ? table1_grid() : opt.el0_grid;

  ExperimentReport rep;
  rep.id = "table1";
  for (double frac : opt.fractions) {
    const std::string case_id = "p" + num(std::round(frac * 1000) / 10);
    struct Trial {
      std::uint64_t seed;
      MeasurementOperator op;
      CVector r;
    };
    std::vector<Trial> trials;
    for (int t = 1; t <= opt.trials; ++t) {
      std::uint64_t seed = opt.seed ^ static_cast<std::uint64_t>(t);
      SamplingPlan plan = build_random_plan(s.M, candidates, frac, seed);
      trials.push_back({seed, MeasurementOperator(spec, plan, fr), table_data(s, grid, plan)});
    }

    // Each trial is its own problem instance: both methods keep their best
    // grid point per trial.
    const std::vector<double> gammas = gammas_for(s, opt.l1_gamma);
    std::vector<Pick> picks;
    for (size_t i = 0; i < trials.size(); ++i) {
      const Trial &tr = trials[i];
      const int t = static_cast<int>(i) + 1;
      Pick pk = best_of_grid(tr.op, tr.r, u, grid_el0, gammas, s, "table1 " + case_id);
      rep.rows.push_back(make_row("table1", case_id, t, "el0m", pk.el_snr, pk.el, pk.pair.beta, pk.pair.gamma, tr.seed));
      rep.rows.push_back(make_row("table1", case_id, t, "l1m", pk.l1_snr, pk.l1, 0.0, pk.gamma, tr.seed));
      picks.push_back(std::move(pk));
    }
    rep.notes.push_back(picks_note(case_id, picks));
    if (s.keep_signals)
      rep.signals.push_back({"table1_" + case_id, time_axis(grid), {{"orig", u}, {"el0m", picks[0].el.u}, {"l1m", picks[0].l1.u}}});
  }
  return rep;
}

// ---------------------------------------------------------------------------

HomogeneousOptions homogeneous_defaults(Scenario s) {
  HomogeneousOptions o;
  o.scenario = s;
  if (s == Scenario::ricker) {
    o.f_max = {54, 48, 42, 36};
    o.f_min = 1.0;
    o.T = 1.344;
    o.M = 168;
    o.wavelet = Ricker{25.0};
    o.levels = 3;
    o.h = 5.0;
    o.scale_factors = {1.0};
    o.el0_grid = {{1e-4, 1e-4 / 0.3}, {1e-4, 1e-4 / 0.6}, {1e-3, 1e-3 / 0.3}, {1e-3, 1e-3 / 0.6}};
    o.l1_gammas = {1e-4, 1e-3, 1e-2, 3e-2, 1e-1};
  } else {
    o.f_max = {9, 7.5, 6, 4.5};
    o.f_min = 0.5;
    o.T = 2.0;
    o.M = 129;
    o.wavelet = GaussianDeriv{0.3, 200.0};
    o.levels = 4;
    o.h = 10.0;
    o.scale_factors = {10.0, 30.0, 100.0};
    o.el0_grid = {{0.73, 21.4757}, {0.75, 21.2899}, {0.75, 18.6696}};
    o.l1_gammas = {1e-3, 1e-2, 1e-1};
  }
  return o;
}

ReceiverSpectrum homogeneous_spectrum(const HomogeneousOptions &opt, const SamplingPlan &plan) {
  TimeGrid grid(opt.T, opt.M);
  const double dist = std::hypot(opt.rcv.first - opt.src.first, opt.rcv.second - opt.src.second);
  const double two_pi = 2.0 * std::numbers::pi;
  ReceiverSpectrum sp;
  if (opt.mode == ModelingMode::fast) {
    const Vector q = sample_periodic(opt.wavelet, grid);
    for (Index m : plan.low_half_rows()) {
      double f = grid.frequency(m);
      sp[m] = green_3d(two_pi * f / opt.velocity, dist) * quadrature_ft(q, grid, f);
    }
    return sp;
  }
  const auto n = static_cast<Index>(std::llround(opt.extent / opt.h)) + 1;
  VelocityModel model = VelocityModel::homogeneous(n, n, opt.h, opt.velocity);
  double f_top = 0;
  for (Index m : plan.low_half_rows())
    f_top = std::max(f_top, grid.frequency(m));
  double kh = two_pi * f_top * opt.h / opt.velocity;
  // The interior scheme is sixth order; allow up to 1.5 instead of 1.
  if (kh > 1.5)
    throw DomainError("homogeneous FD: kappa h = " + num(kh) + " above 1.5, reduce h");
  auto spectra = model_receiver_spectra(model, opt.wavelet, opt.src, {opt.rcv}, grid, plan, opt.pml, true);
  for (auto [m, v] : spectra.front()) {
    double kappa = two_pi * grid.frequency(m) / opt.velocity;
    sp[m] = v * green_3d(kappa, dist) / green_2d(kappa, dist);
  }
  return sp;
}

ExperimentReport run_homogeneous(const HomogeneousOptions &opt) {
  if (opt.f_max.empty())
    throw DomainError("homogeneous: no f_max given");
  if (opt.el0_grid.empty() || opt.l1_gammas.empty() || opt.scale_factors.empty())
    throw DomainError("homogeneous: empty parameter grid");
  TimeGrid grid(opt.T, opt.M);
  FrameletSystem fr(opt.M, opt.levels);
  const std::string exp = opt.scenario == Scenario::ricker ? "homogeneous-ricker" : "homogeneous-gaussian";
  const double dist = std::hypot(opt.rcv.first - opt.src.first, opt.rcv.second - opt.src.second);
  const Vector orig = dalembert_seismogram(opt.velocity, opt.wavelet, opt.src, opt.rcv, grid).samples;

  double widest = *std::max_element(opt.f_max.begin(), opt.f_max.end());
  SamplingPlan wide = build_band_plan(opt.M, opt.T, opt.f_min, widest, BandSnap::inside);
  const ReceiverSpectrum spectrum = homogeneous_spectrum(opt, wide);
  std::optional<ReceiverSpectrum> analytic;
  if (opt.mode == ModelingMode::fd) {
    HomogeneousOptions fast = opt;
    fast.mode = ModelingMode::fast;
    analytic = homogeneous_spectrum(fast, wide);
  }

  ExperimentReport rep;
  rep.id = exp;
  for (double f : opt.f_max) {
    const std::string case_id = "fmax" + num(f);
    SamplingPlan plan = build_band_plan(opt.M, opt.T, opt.f_min, f, BandSnap::inside);
    CVector r = assemble_measurements(spectrum, plan, grid);

    struct Pick {
      Vector u;
      double aligned = -std::numeric_limits<double>::infinity();
      double raw = 0;
      Outcome o;
      double beta = 0, gamma = 0, scale = 0;
    };
    auto consider = [&](Pick &best, Reconstruction rec, double ms, double beta, double gamma, double a) {
      double al = aligned_snr(orig, rec.samples, opt.max_lag);
      if (al > best.aligned) {
        best.aligned = al;
        best.raw = snr(orig, rec.samples);
        best.o = Outcome{rec.samples, rec.iterations, ms};
        best.u = std::move(rec.samples);
        best.beta = beta;
        best.gamma = gamma;
        best.scale = a;
      }
    };

    Pick idft, l1, el;
    {
      auto t0 = Clock::now();
      Reconstruction rec = reconstruct(r, plan, grid, fr, IdftMethod{});
      consider(idft, std::move(rec), ms_since(t0), 0, 0, 0);
    }
    for (double a : opt.scale_factors) {
      ScalePolicy policy{DataScale::samples, a * 4.0 * std::numbers::pi * dist};
      for (double g : opt.l1_gammas) {
        auto t0 = Clock::now();
        Reconstruction rec = reconstruct(r, plan, grid, fr, L1mMethod{g, opt.tol, opt.max_iter}, policy);
        consider(l1, std::move(rec), ms_since(t0), 0, g, a);
      }
      for (const El0Pair &p : opt.el0_grid) {
        SolverConfig cfg(RegParams(p.beta, p.gamma));
        cfg.tol = opt.tol;
        cfg.max_iter = opt.max_iter;
        auto t0 = Clock::now();
        Reconstruction rec = reconstruct(r, plan, grid, fr, El0mMethod{cfg}, policy);
        if (!rec.audit->ok())
          throw NumericalError(exp + " " + case_id + ": EL0M trace violates its invariants");
        consider(el, std::move(rec), ms_since(t0), p.beta, p.gamma, a);
      }
    }
    for (auto [name, pick] : {std::pair<const char *, Pick *>{"idft", &idft}, {"l1m", &l1}, {"el0m", &el}}) {
      rep.rows.push_back(make_row(exp, case_id, 1, name, pick->aligned, pick->o, pick->beta, pick->gamma, 0));
      rep.rows.push_back(
          make_row(exp, case_id, 1, std::string(name) + "_unaligned", pick->raw, pick->o, pick->beta, pick->gamma, 0));
    }
    if (analytic) {
      // FD data against the analytic spectrum, compared as band-limited traces.
      Vector a = reconstruct(assemble_measurements(*analytic, plan, grid), plan, grid, fr, IdftMethod{}).samples;
      rep.rows.push_back(make_row(exp, case_id, 1, "fd_vs_fast", snr(a, idft.u), Outcome{}, 0, 0, 0));
    }
    rep.notes.push_back(case_id + ": EL0M beta=" + num(el.beta) + " gamma=" + num(el.gamma) + " scale=" +
                        num(el.scale) + ", L1M gamma=" + num(l1.gamma) + " scale=" + num(l1.scale));
    rep.signals.push_back({exp + "_" + case_id,
                           time_axis(grid),
                           {{"orig", orig}, {"idft", idft.u}, {"l1m", l1.u}, {"el0m", el.u}}});
  }
  rep.notes.push_back(std::string("mode ") + (opt.mode == ModelingMode::fast ? "fast" : "fd") +
                      ", SNR columns aligned within " + std::to_string(opt.max_lag) + " samples");
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

Method layered_method(const LayeredOptions &opt, const std::string &name) {
  if (name == "idft")
    return IdftMethod{};
  if (name == "l1m")
    return L1mMethod{opt.l1_gamma, opt.tol, opt.max_iter};
  if (name == "el0m") {
    SolverConfig cfg(RegParams(opt.el0.beta, opt.el0.gamma));
    cfg.tol = opt.tol;
    cfg.max_iter = opt.max_iter;
    return El0mMethod{cfg};
  }
  throw DomainError("unknown method '" + name + "'");
}

} // namespace

LayeredResult run_layered(const LayeredOptions &opt) {
  if (opt.f_max.empty() || opt.methods.empty())
    throw DomainError("layered: need at least one f_max and one method");
  TimeGrid grid(opt.T, opt.M);
  FrameletSystem fr(opt.M, opt.levels);
  VelocityModel model = VelocityModel::three_layer(opt.nx, opt.nz, opt.h, opt.z1, opt.z2, opt.v1, opt.v2, opt.v3);
  std::vector<std::pair<double, double>> receivers;
  for (Index j = 0; j < opt.receiver_count; ++j)
    receivers.emplace_back(opt.receiver_spacing * static_cast<double>(j), 0.0);

  double widest = *std::max_element(opt.f_max.begin(), opt.f_max.end());
  SamplingPlan wide = build_band_plan(opt.M, opt.T, opt.f_min, widest, BandSnap::inside);
  auto spectra = model_receiver_spectra(model, opt.wavelet, opt.src, receivers, grid, wide, opt.pml);

  LayeredResult out;
  out.report.id = "layered";
  for (double f : opt.f_max) {
    const std::string case_id = "fmax" + num(f);
    SamplingPlan plan = build_band_plan(opt.M, opt.T, opt.f_min, f, BandSnap::inside);
    for (const auto &name : opt.methods) {
      auto t0 = Clock::now();
      ShotRecord rec = shot_record_from_spectra(spectra, receivers, grid, plan, fr, layered_method(opt, name));
      Outcome o{Vector(), 0, ms_since(t0)};
      double beta = name == "el0m" ? opt.el0.beta : 0.0;
      double gamma = name == "el0m" ? opt.el0.gamma : (name == "l1m" ? opt.l1_gamma : 0.0);
      out.report.rows.push_back(make_row("layered", case_id, 1, name, std::numeric_limits<double>::quiet_NaN(), o,
                                         beta, gamma, 0));
      out.records.emplace(case_id + "/" + name, std::move(rec));
    }
  }

  if (opt.check_degenerate) {
    // Zero-contrast model at the probe receivers: FD against the analytic
    // line-source response, and first arrivals against straight-ray times.
    VelocityModel flat = VelocityModel::three_layer(opt.nx, opt.nz, opt.h, opt.z1, opt.z2, opt.v1, opt.v1, opt.v1);
    std::vector<std::pair<double, double>> probes;
    for (double x : opt.probes)
      probes.emplace_back(x, 0.0);
    SamplingPlan plan = build_band_plan(opt.M, opt.T, opt.f_min, widest, BandSnap::inside);
    auto fd = model_receiver_spectra(flat, opt.wavelet, opt.src, probes, grid, plan, opt.pml);
    const Vector q = sample_periodic(opt.wavelet, grid);
    const std::string arrival_method =
        std::find(opt.methods.begin(), opt.methods.end(), "el0m") != opt.methods.end() ? "el0m" : opt.methods.front();
    double worst = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < probes.size(); ++k) {
      const double dist = std::hypot(probes[k].first - opt.src.first, probes[k].second - opt.src.second);
      ReceiverSpectrum exact;
      for (Index m : plan.low_half_rows()) {
        double f = grid.frequency(m);
        exact[m] = green_2d(2.0 * std::numbers::pi * f / opt.v1, dist) * quadrature_ft(q, grid, f);
      }
      Vector a = reconstruct(assemble_measurements(exact, plan, grid), plan, grid, fr, IdftMethod{}).samples;
      CVector r = assemble_measurements(fd[k], plan, grid);
      Vector b = reconstruct(r, plan, grid, fr, IdftMethod{}).samples;
      worst = std::min(worst, snr(a, b));

      Reconstruction rec =
          reconstruct(r, plan, grid, fr, layered_method(opt, arrival_method), ScalePolicy{DataScale::peak, 1.0});
      auto expected = static_cast<Index>(std::llround(dist / opt.v1 / grid.lambda()));
      out.arrivals.push_back({probes[k].first, expected, first_peak(rec.samples, 0.5)});
    }
    out.degenerate_snr = worst;
    std::ostringstream note;
    note << "degenerate model: FD vs analytic min SNR " << std::round(worst * 100) / 100 << " dB; arrivals ("
         << arrival_method << ", expected/measured samples)";
    for (const auto &a : out.arrivals)
      note << " x=" << a.x << ':' << a.expected << '/' << a.measured;
    out.report.notes.push_back(note.str());
  }
  return out;
}

} // namespace envl0
