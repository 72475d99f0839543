#include "envl0/seismic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace envl0 {

namespace {
constexpr double kPi = std::numbers::pi;
}

TimeGrid::TimeGrid(double record_length, Index samples) : T_(record_length), M_(samples) {
  if (!(record_length > 0) || !std::isfinite(record_length))
    throw DomainError("TimeGrid: record length must be positive");
  if (samples < 2)
    throw DomainError("TimeGrid: need at least two samples");
}

void validate(const SourceWavelet &w) {
  if (auto *r = std::get_if<Ricker>(&w); r && !(r->f0 > 0))
    throw DomainError("Ricker: f0 must be positive");
  if (auto *g = std::get_if<GaussianDeriv>(&w); g && !(g->alpha > 0))
    throw DomainError("GaussianDeriv: alpha must be positive");
}

double ricker(double t, double f0) {
  double a = kPi * kPi * f0 * f0 * t * t;
  return (1.0 - 2.0 * a) * std::exp(-a);
}

double gaussian_deriv(double t, double t0, double alpha) {
  if (!(alpha > 0))
    throw DomainError("gaussian_deriv: alpha must be positive");
  double s = t - t0;
  return -2.0 * alpha * s * std::exp(-alpha * s * s);
}

Complex gaussian_deriv_ft(double f, double t0, double alpha) {
  if (!(alpha > 0))
    throw DomainError("gaussian_deriv_ft: alpha must be positive");
  double mag = 2.0 * std::sqrt(kPi / alpha) * kPi * f * std::exp(-kPi * kPi * f * f / alpha);
  double ph = 2.0 * kPi * f * t0;
  return mag * Complex(std::sin(ph), std::cos(ph));
}

double evaluate(const SourceWavelet &w, double t) {
  return std::visit(
      [t](const auto &s) -> double {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ricker>)
          return ricker(t, s.f0);
        else
          return gaussian_deriv(t, s.t0, s.alpha);
      },
      w);
}

Vector sample_periodic(const SourceWavelet &w, const TimeGrid &grid, double delay) {
  validate(w);
  const Index M = grid.samples();
  const double T = grid.record_length();
  Vector u(M);
  for (Index n = 0; n < M; ++n) {
    double t = grid.time(n) - delay;
    // Fold into [-T/2, T/2) and add the two neighbouring periods.
    t -= T * std::floor(t / T + 0.5);
    u[n] = evaluate(w, t - T) + evaluate(w, t) + evaluate(w, t + T);
  }
  return u;
}

Complex quadrature_ft(const Vector &samples, const TimeGrid &grid, double f) {
  require_size(samples.size(), grid.samples(), "quadrature_ft");
  const double lam = grid.lambda();
  Complex sum = 0.0;
  for (Index n = 0; n < samples.size(); ++n)
    sum += samples[n] * std::polar(1.0, -2.0 * kPi * f * lam * static_cast<double>(n));
  return lam * sum;
}

Complex green_2d(double kappa, double r) {
  if (!(r > 0))
    throw DomainError("green_2d: r must be positive");
  double x = kappa * r;
  // H0^(2) = J0 - i Y0.
  Complex h2(std::cyl_bessel_j(0.0, x), -std::cyl_neumann(0.0, x));
  return Complex(0.0, -0.25) * h2;
}

Complex green_3d(double kappa, double r) {
  if (!(r > 0))
    throw DomainError("green_3d: r must be positive");
  return std::polar(1.0 / (4.0 * kPi * r), -kappa * r);
}

// ---------------------------------------------------------------------------

VelocityModel::VelocityModel(Index nx, Index nz, double h, Eigen::MatrixXd velocity)
    : nx_(nx), nz_(nz), h_(h), v_(std::move(velocity)) {
  if (nx < 2 || nz < 2)
    throw DomainError("VelocityModel: need at least 2x2 nodes");
  if (!(h > 0))
    throw DomainError("VelocityModel: h must be positive");
  if (v_.rows() != nz || v_.cols() != nx)
    throw DimensionError("VelocityModel: velocity grid must be nz x nx");
  if (!(v_.array() > 0).all() || !v_.allFinite())
    throw DomainError("VelocityModel: velocities must be positive and finite");
}

VelocityModel VelocityModel::homogeneous(Index nx, Index nz, double h, double v) {
  return VelocityModel(nx, nz, h, Eigen::MatrixXd::Constant(nz, nx, v));
}

VelocityModel VelocityModel::three_layer(Index nx, Index nz, double h, double z1, double z2, double v1, double v2,
                                         double v3) {
  if (!(z1 <= z2))
    throw DomainError("VelocityModel: interfaces must satisfy z1 <= z2");
  Eigen::MatrixXd v(nz, nx);
  for (Index i = 0; i < nz; ++i) {
    double z = static_cast<double>(i) * h;
    v.row(i).setConstant(z < z1 ? v1 : (z < z2 ? v2 : v3));
  }
  return VelocityModel(nx, nz, h, std::move(v));
}

std::pair<Index, Index> VelocityModel::node(double x, double z) const {
  auto i = static_cast<Index>(std::llround(z / h_));
  auto j = static_cast<Index>(std::llround(x / h_));
  if (i < 0 || i >= nz_ || j < 0 || j >= nx_)
    throw DomainError("VelocityModel: point (" + std::to_string(x) + ", " + std::to_string(z) +
                      ") outside the model");
  return {i, j};
}

// ---------------------------------------------------------------------------

Seismogram dalembert_seismogram(double v, const SourceWavelet &source, std::pair<double, double> src,
                                std::pair<double, double> rcv, const TimeGrid &grid) {
  if (!(v > 0))
    throw DomainError("dalembert_seismogram: velocity must be positive");
  double r = std::hypot(rcv.first - src.first, rcv.second - src.second);
  if (!(r > 0))
    throw DomainError("dalembert_seismogram: source and receiver coincide");
  Vector s = sample_periodic(source, grid, r / v) / (4.0 * kPi * r);
  return Seismogram{rcv.first, rcv.second, grid, std::move(s)};
}

CVector assemble_measurements(const ReceiverSpectrum &values, const SamplingPlan &plan, const TimeGrid &grid) {
  if (plan.length() != grid.samples())
    throw DimensionError("assemble_measurements: plan and grid lengths differ");
  const double scale = 1.0 / std::sqrt(static_cast<double>(grid.samples()));
  CVector r(plan.size());
  for (Index m : plan.low_half_rows()) {
    auto it = values.find(m);
    if (it == values.end())
      throw DomainError("assemble_measurements: missing value for row " + std::to_string(m));
    Complex v = it->second * scale;
    if (plan.is_self_conjugate(m))
      v = Complex(v.real(), 0.0);
    r[plan.position(m)] = v;
    r[plan.position(plan.conjugate_row(m))] = std::conj(v);
  }
  return r;
}

Reconstruction reconstruct(const CVector &r, const SamplingPlan &plan, const TimeGrid &grid,
                           const FrameletSystem &framelet, const Method &method, ScalePolicy scale) {
  if (plan.length() != grid.samples() || framelet.signal_length() != grid.samples())
    throw DimensionError("reconstruct: plan, grid and framelet lengths differ");
  require_size(r.size(), plan.size(), "reconstruct");
  const double lam = grid.lambda();
  FourierSpec spec(grid.samples());

  Vector idft = dft_adjoint(spec, select_adjoint(plan, r)).real() / lam;
  Reconstruction out;
  if (std::holds_alternative<IdftMethod>(method)) {
    out.samples = std::move(idft);
    return out;
  }

  if (!(scale.value > 0))
    throw DomainError("reconstruct: scale factor must be positive");
  double s = scale.value;
  if (scale.kind == DataScale::samples) {
    s /= lam;
  } else if (scale.kind == DataScale::peak) {
    double p = idft.cwiseAbs().maxCoeff();
    if (p == 0.0) {
      out.samples = Vector::Zero(grid.samples());
      return out;
    }
    s /= lam * p;
  }
  out.scale = s;
  MeasurementOperator op(spec, plan, framelet);
  const CVector rs = r * s;
  if (const auto *l1 = std::get_if<L1mMethod>(&method)) {
    L1mResult res = l1m_solve(op, rs, l1->gamma, l1->tol, l1->max_iter);
    out.samples = framelet.synthesis(res.y) / (s * lam);
    out.iterations = res.trace.iterations;
    out.converged = res.trace.converged;
  } else {
    const auto &el = std::get<El0mMethod>(method);
    El0mResult res = el0m_solve(op, rs, el.config);
    out.samples = framelet.synthesis(res.y) / (s * lam);
    out.iterations = res.trace.iterations;
    out.converged = res.trace.converged;
    out.audit = audit_trace(res, el.config);
  }
  return out;
}

Seismogram reconstruct_seismogram(const CVector &r, const SamplingPlan &plan, const TimeGrid &grid,
                                  const FrameletSystem &framelet, const Method &method, ScalePolicy scale) {
  Reconstruction rec = reconstruct(r, plan, grid, framelet, method, scale);
  return Seismogram{0.0, 0.0, grid, std::move(rec.samples)};
}

std::vector<ReceiverSpectrum> model_receiver_spectra(const VelocityModel &model, const SourceWavelet &source,
                                                     std::pair<double, double> src,
                                                     const std::vector<std::pair<double, double>> &receivers,
                                                     const TimeGrid &grid, const SamplingPlan &plan,
                                                     const PmlSettings &pml, bool allow_coarse) {
  if (plan.length() != grid.samples())
    throw DimensionError("model_receiver_spectra: plan and grid lengths differ");
  const Vector q = sample_periodic(source, grid);
  auto src_node = model.node(src.first, src.second);
  std::vector<std::pair<Index, Index>> rcv_nodes;
  for (const auto &p : receivers)
    rcv_nodes.push_back(model.node(p.first, p.second));

  std::vector<ReceiverSpectrum> out(receivers.size());
  HelmholtzSolver solver(model, pml);
  for (Index m : plan.low_half_rows()) {
    if (m == 1)
      throw DomainError("model_receiver_spectra: the zero frequency cannot be modeled");
    double f = grid.frequency(m);
    Complex qf = quadrature_ft(q, grid, f);
    solver.factorize(f, allow_coarse);
    HelmholtzField field = solver.solve({{src_node, qf}});
    for (size_t k = 0; k < rcv_nodes.size(); ++k)
      out[k][m] = field.at(rcv_nodes[k].first, rcv_nodes[k].second);
  }
  return out;
}

ShotRecord shot_record_from_spectra(const std::vector<ReceiverSpectrum> &spectra,
                                    const std::vector<std::pair<double, double>> &receivers, const TimeGrid &grid,
                                    const SamplingPlan &plan, const FrameletSystem &framelet, const Method &method,
                                    ScalePolicy scale) {
  if (spectra.size() != receivers.size())
    throw DimensionError("shot_record_from_spectra: one spectrum per receiver required");
  ShotRecord rec{receivers, grid, Eigen::MatrixXd(grid.samples(), static_cast<Index>(receivers.size()))};
  for (size_t k = 0; k < receivers.size(); ++k) {
    CVector r = assemble_measurements(spectra[k], plan, grid);
    Reconstruction res = reconstruct(r, plan, grid, framelet, method, scale);
    if (res.audit && !res.audit->ok())
      throw NumericalError("shot record: EL0M trace violates its invariants at receiver " + std::to_string(k));
    rec.data.col(static_cast<Index>(k)) = res.samples;
  }
  return rec;
}

ShotRecord generate_shot_record(const VelocityModel &model, const SourceWavelet &source,
                                std::pair<double, double> src,
                                const std::vector<std::pair<double, double>> &receivers, const TimeGrid &grid,
                                const SamplingPlan &plan, const FrameletSystem &framelet, const Method &method,
                                ScalePolicy scale, const PmlSettings &pml) {
  auto spectra = model_receiver_spectra(model, source, src, receivers, grid, plan, pml);
  return shot_record_from_spectra(spectra, receivers, grid, plan, framelet, method, scale);
}

Index first_arrival(const Vector &trace, double fraction) {
  double peak = trace.cwiseAbs().maxCoeff();
  if (peak == 0.0)
    return -1;
  for (Index n = 0; n < trace.size(); ++n)
    if (std::abs(trace[n]) > fraction * peak)
      return n;
  return -1;
}

Index first_peak(const Vector &trace, double fraction) {
  Index n = first_arrival(trace, fraction);
  if (n < 0)
    return -1;
  while (n + 1 < trace.size() && std::abs(trace[n + 1]) >= std::abs(trace[n]))
    ++n;
  return n;
}

} // namespace envl0
