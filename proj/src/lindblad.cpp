#include "anneal/lindblad.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>

namespace anneal {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

ComplexMatrix to_eigenbasis(const RealMatrix& v, const ComplexMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  out.real() = v.transpose() * m.real() * v;
  out.imag() = v.transpose() * m.imag() * v;
  return out;
}

ComplexMatrix from_eigenbasis(const RealMatrix& v, const ComplexMatrix& m) {
  ComplexMatrix out(m.rows(), m.cols());
  out.real() = v * m.real() * v.transpose();
  out.imag() = v * m.imag() * v.transpose();
  return out;
}

void apply_dissipator(const ComplexMatrix& rho, const BohrSpectrum& spec,
                      const std::vector<double>& rates, ComplexMatrix& out) {
  for (size_t k = 0; k < spec.bins.size(); ++k) {
    const double g = rates[k];
    if (g == 0.0) continue;
    const BohrBin& bin = spec.bins[k];
    for (const auto& ei : bin.entries) {
      if (ei.v == 0.0) continue;
      for (const auto& ej : bin.entries) {
        if (ej.v == 0.0) continue;
        out(ei.a, ej.a) += g * ei.v * ej.v * rho(ei.b, ej.b);
      }
    }
    for (const auto& m : bin.ldl) {
      const double gv = 0.5 * g * m.v;
      out.row(m.a) -= gv * rho.row(m.b);
      out.col(m.b) -= gv * rho.col(m.a);
    }
  }
}

void apply_dissipator_flat(const ComplexMatrix& rho, const FlatBins& bins,
                           const std::vector<double>& rates,
                           ComplexMatrix& out) {
  const int dim = bins.dim;
  for (int k = 0; k < bins.bins(); ++k) {
    const double g = rates[k];
    if (g == 0.0) continue;
    for (int i = bins.entry_off[k]; i < bins.entry_off[k + 1]; ++i) {
      const auto& ei = bins.entries[i];
      if (ei.v == 0.0) continue;
      for (int j = bins.entry_off[k]; j < bins.entry_off[k + 1]; ++j) {
        const auto& ej = bins.entries[j];
        if (ej.v == 0.0) continue;
        out(ei.a, ej.a) += g * ei.v * ej.v * rho(ei.b, ej.b);
      }
    }
    for (int l = bins.ldl_off[k]; l < bins.ldl_off[k + 1]; ++l) {
      const auto& m = bins.ldl[l];
      const double gv = 0.5 * g * m.v;
      for (int c = 0; c < dim; ++c) {
        out(m.a, c) -= gv * rho(m.b, c);
        out(c, m.b) -= gv * rho(c, m.a);
      }
    }
  }
}

RealMatrix lamb_shift_from_flat(const FlatBins& bins, const BathParams& bath,
                                const LambShiftTable* table,
                                const QuadratureConfig& quad) {
  RealMatrix h = RealMatrix::Zero(bins.dim, bins.dim);
  if (bath.eta == 0.0) return h;
  for (int k = 0; k < bins.bins(); ++k) {
    if (bins.ldl_off[k] == bins.ldl_off[k + 1]) continue;
    const double s_w = table ? bath.eta * (*table)(bins.omega[k])
                             : lamb_shift_rate(bins.omega[k], bath, quad);
    for (int l = bins.ldl_off[k]; l < bins.ldl_off[k + 1]; ++l)
      h(bins.ldl[l].a, bins.ldl[l].b) += s_w * bins.ldl[l].v;
  }
  return h;
}

}  // namespace

double trace_error(const DensityMatrix& rho) {
  return std::abs(rho.trace() - std::complex<double>(1.0, 0.0));
}

double hermiticity_defect(const DensityMatrix& rho) {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const DensityMatrix& rho) {
  const ComplexMatrix herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(herm,
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues()(0);
}

DensityMatrix initial_state(const ModelParams& params, const Schedule& sched) {
  params.validate();
  if (!sched.A || !sched.B || sched.A(0.0) != 1.0 || sched.B(0.0) != 0.0)
    throw std::invalid_argument("initial_state: schedule must satisfy A(0)=1, B(0)=0");
  const RealMatrix h = annealing_hamiltonian(params, sched, 0.0);
  const SpectralDecomposition d = eigendecompose(h, 0.0);
  const double spread = d.energies(d.dim() - 1) - d.energies(0);
  if (d.dim() < 2 || d.energies(1) - d.energies(0) <= 1e-10 * std::max(1.0, spread))
    throw EvolutionError(
        "initial_state: ground level of H(0) is degenerate; the initial "
        "state is ill-defined (requires Gamma > 0)");
  const Eigen::VectorXd g0 = d.vectors.col(0);
  ComplexMatrix rho(d.dim(), d.dim());
  rho.real() = g0 * g0.transpose();
  rho.imag().setZero();
  return rho;
}

double EvolutionContext::omega_bound(const ModelParams& params) {
  const SpectralDecomposition d0 = eigendecompose(driver_hamiltonian(params));
  const SpectralDecomposition d1 = eigendecompose(target_hamiltonian(params));
  const double r0 = d0.energies(d0.dim() - 1) - d0.energies(0);
  const double r1 = d1.energies(d1.dim() - 1) - d1.energies(0);
  return 1.02 * (r0 + r1) + 1.0;
}

EvolutionContext::EvolutionContext(
    const ModelParams& params, const Schedule& sched, const BathParams& bath,
    const EvolutionConfig& config, std::shared_ptr<const LambShiftTable> table)
    : params_(params),
      schedule_(sched),
      bath_(bath),
      config_(config),
      table_(std::move(table)) {
  params_.validate();
  bath_.validate();
  validate_schedule(schedule_);
  if (config_.t_f < 0.0)
    throw std::invalid_argument("EvolutionConfig: t_f must be >= 0");
  if (!(config_.tol_omega > 0.0))
    throw std::invalid_argument("EvolutionConfig: tol_omega must be > 0");
  if (config_.step.adaptive &&
      !(config_.step.rel_tol > 0.0 && config_.step.abs_tol > 0.0))
    throw std::invalid_argument("EvolutionConfig: tolerances must be > 0");
  h0_ = driver_hamiltonian(params_);
  h1_ = target_hamiltonian(params_);
  coupling_ = coupling_operator(params_.N);
  const bool wants_table = config_.lamb_shift_enabled &&
                           !config_.lamb_shift_exact && bath_.eta > 0.0;
  if (wants_table && !table_)
    table_ = std::make_shared<LambShiftTable>(bath_, omega_bound(params_),
                                              config_.lamb_table_points,
                                              config_.lamb_quad);
  // RK4 revisits three s values per step; the embedded adaptive pair visits
  // up to seven per attempt.
  cache_.resize(12);
}

const GeneratorStage& EvolutionContext::stage(double s) const {
  for (const CacheSlot& slot : cache_)
    if (slot.valid && slot.s == s) return slot.stage;

  CacheSlot& slot = cache_[cache_clock_];
  cache_clock_ = (cache_clock_ + 1) % static_cast<int>(cache_.size());
  slot.valid = false;
  slot.s = s;

  GeneratorStage& st = slot.stage;
  const RealMatrix h = schedule_.A(s) * h0_ + schedule_.B(s) * h1_;
  st.d = eigendecompose(h, s);
  if (gauge_hook) gauge_hook(st.d);
  bohr_bins_flat(st.d, coupling_, config_.tol_omega, st.bins);
  st.rates.resize(st.bins.bins());
  for (int k = 0; k < st.bins.bins(); ++k)
    st.rates[k] = rate(st.bins.omega[k], bath_);
  st.has_lamb_shift = config_.lamb_shift_enabled && bath_.eta > 0.0;
  if (st.has_lamb_shift) {
    st.h_ls = lamb_shift_from_flat(
        st.bins, bath_, config_.lamb_shift_exact ? nullptr : table_.get(),
        config_.lamb_quad);
  } else {
    st.h_ls.resize(0, 0);
  }
  slot.valid = true;
  return st;
}

ComplexMatrix dissipator(const ComplexMatrix& rho_eig, const BohrSpectrum& spec,
                         const BathParams& bath) {
  std::vector<double> rates(spec.bins.size());
  for (size_t k = 0; k < spec.bins.size(); ++k)
    rates[k] = rate(spec.bins[k].omega, bath);
  ComplexMatrix out = ComplexMatrix::Zero(spec.dim, spec.dim);
  apply_dissipator(rho_eig, spec, rates, out);
  return out;
}

RealMatrix lamb_shift_hamiltonian(const BohrSpectrum& spec,
                                  const BathParams& bath,
                                  const QuadratureConfig& quad) {
  RealMatrix h = RealMatrix::Zero(spec.dim, spec.dim);
  if (bath.eta == 0.0) return h;
  for (const BohrBin& bin : spec.bins) {
    if (bin.ldl.empty()) continue;
    const double s_w = lamb_shift_rate(bin.omega, bath, quad);
    for (const auto& m : bin.ldl) h(m.a, m.b) += s_w * m.v;
  }
  return h;
}

RealMatrix lamb_shift_hamiltonian(const BohrSpectrum& spec,
                                  const BathParams& bath,
                                  const LambShiftTable& table) {
  RealMatrix h = RealMatrix::Zero(spec.dim, spec.dim);
  if (bath.eta == 0.0) return h;
  for (const BohrBin& bin : spec.bins) {
    if (bin.ldl.empty()) continue;
    const double s_w = bath.eta * table(bin.omega);
    for (const auto& m : bin.ldl) h(m.a, m.b) += s_w * m.v;
  }
  return h;
}

ComplexMatrix lindblad_rhs(const DensityMatrix& rho, double s,
                           const EvolutionContext& ctx) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("lindblad_rhs: s outside [0,1]");
  const GeneratorStage& st = ctx.stage(s);
  RhsWorkspace& ws = ctx.workspace();
  const RealMatrix& v = st.d.vectors;
  const int dim = st.d.dim();

  // rotate into the instantaneous eigenbasis, real and imaginary parts split
  ws.t1.noalias() = v.transpose() * rho.real();
  ws.re.noalias() = ws.t1 * v;
  ws.t1.noalias() = v.transpose() * rho.imag();
  ws.im.noalias() = ws.t1 * v;
  ws.r.resize(dim, dim);
  ws.r.real() = ws.re;
  ws.r.imag() = ws.im;

  ws.dr.resize(dim, dim);
  const Eigen::VectorXd& w = st.d.energies;
  for (int b = 0; b < dim; ++b)
    for (int a = 0; a < dim; ++a)
      ws.dr(a, b) = kI * (w(b) - w(a)) * ws.r(a, b);
  if (st.has_lamb_shift) {
    // i [rho, H_LS] with H_LS real: X = rho H - H rho, then dr += iX
    ws.t1.noalias() = ws.re * st.h_ls;
    ws.t1.noalias() -= st.h_ls * ws.re;  // Re X
    ws.dr.imag() += ws.t1;
    ws.t1.noalias() = ws.im * st.h_ls;
    ws.t1.noalias() -= st.h_ls * ws.im;  // Im X
    ws.dr.real() -= ws.t1;
  }
  apply_dissipator_flat(ws.r, st.bins, st.rates, ws.dr);

  // rotate back to the Dicke basis
  ws.t1.noalias() = v * ws.dr.real();
  ws.re.noalias() = ws.t1 * v.transpose();
  ws.t1.noalias() = v * ws.dr.imag();
  ws.im.noalias() = ws.t1 * v.transpose();
  ComplexMatrix out(dim, dim);
  out.real() = ws.re;
  out.imag() = ws.im;
  return out;
}

namespace {

struct StepperState {
  RunDiagnostics diag;
  std::vector<TrajectoryPoint> trajectory;
};

// Shared post-step bookkeeping: Hermitization, invariant checks, recording.
// u is the completed fraction of the run; s_obs the s at which observables
// are evaluated.
void after_step(const EvolutionContext& ctx, DensityMatrix& rho, double u,
                double s_obs, long step_index, bool is_last,
                StepperState& state) {
  const EvolutionConfig& cfg = ctx.config();
  const double drift = hermiticity_defect(rho);
  state.diag.max_hermiticity_drift =
      std::max(state.diag.max_hermiticity_drift, drift);
  rho = 0.5 * (rho + rho.adjoint()).eval();

  const bool check =
      cfg.invariant_check_stride > 0 &&
      (step_index % cfg.invariant_check_stride == 0 || is_last);
  if (check) {
    const double terr = trace_error(rho);
    const double me = min_eigenvalue(rho);
    state.diag.max_trace_error = std::max(state.diag.max_trace_error, terr);
    state.diag.min_eigenvalue = std::min(state.diag.min_eigenvalue, me);
    if (terr > cfg.max_trace_error || me < cfg.min_eigenvalue_floor)
      throw EvolutionError(
          "evolve: invariant breach (trace error " + std::to_string(terr) +
          ", min eigenvalue " + std::to_string(me) +
          "); step control too loose");
  }
  if (cfg.record_stride > 0 &&
      (step_index % cfg.record_stride == 0 || is_last)) {
    TrajectoryPoint pt;
    pt.s = u;
    pt.epsilon = residual_energy(rho, ctx.params());
    pt.ground_population = ground_state_population(rho, ctx.stage(s_obs).d);
    pt.trace_err = trace_error(rho);
    pt.min_eig = min_eigenvalue(rho);
    state.trajectory.push_back(pt);
  }
}

// Reference frame of one step: the eigenbasis of H(s_ref) with the diagonal
// phases (energies plus diagonal Lamb shift) removed exactly, so the explicit
// stepper only sees the slow remainder (basis rotation and dissipation).
// Plain stepping would instead damp every coherence by |R(i w h)| < 1 per
// step, which breaks positivity long before the dissipative scales are
// resolved.
struct LawsonFrame {
  RealMatrix vectors;
  Eigen::VectorXd lambda;

  explicit LawsonFrame(const GeneratorStage& ref)
      : vectors(ref.d.vectors), lambda(ref.d.energies) {
    if (ref.has_lamb_shift) lambda += ref.h_ls.diagonal();
  }

  // E M E^dag with E = diag(exp(i lambda_a tau)), elementwise phases.
  void phases(ComplexMatrix& m, double tau, bool inverse) const {
    const int n = static_cast<int>(lambda.size());
    Eigen::VectorXcd p(n);
    const double sgn = inverse ? -1.0 : 1.0;
    for (int a = 0; a < n; ++a)
      p(a) = std::exp(kI * (sgn * lambda(a) * tau));
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) m(a, b) *= p(a) * std::conj(p(b));
  }

  ComplexMatrix to_frame(const DensityMatrix& rho) const {
    return to_eigenbasis(vectors, rho);
  }
  DensityMatrix from_frame(const ComplexMatrix& rho_bar) const {
    return from_eigenbasis(vectors, rho_bar);
  }
};

// Integrates rho over u in [0,1]; s_of_u maps progress to the schedule
// parameter. Derivatives are with respect to u (the t_f factor is applied
// here); Lawson phases run in time units.
template <typename SOfU>
void integrate(const EvolutionContext& ctx, const SOfU& s_of_u,
               DensityMatrix& rho, StepperState& state) {
  const EvolutionConfig& cfg = ctx.config();
  const double t_f = cfg.t_f;
  const double default_h = std::min(0.025 / ctx.params().E, t_f / 2000.0);
  const double h_time = cfg.step.h > 0.0 ? cfg.step.h : default_h;
  const bool lawson = cfg.step.lawson_frame;

  auto f_plain = [&](double u, const ComplexMatrix& r) {
    return ComplexMatrix(t_f * lindblad_rhs(r, s_of_u(u), ctx));
  };
  // d sigma / du in the step frame; c is the stage offset within [u0, u0+h].
  auto f_frame = [&](const LawsonFrame& frame, double u0, double h, double c,
                     const ComplexMatrix& sigma) {
    const double tau = c * h * t_f;
    ComplexMatrix rho_bar = sigma;
    frame.phases(rho_bar, tau, true);
    const DensityMatrix r = frame.from_frame(rho_bar);
    ComplexMatrix rb = to_eigenbasis(
        frame.vectors, lindblad_rhs(r, s_of_u(u0 + c * h), ctx));
    for (int b = 0; b < rb.cols(); ++b)
      for (int a = 0; a < rb.rows(); ++a)
        rb(a, b) -= kI * (frame.lambda(b) - frame.lambda(a)) * rho_bar(a, b);
    frame.phases(rb, tau, false);
    return ComplexMatrix(t_f * rb);
  };

  if (!cfg.step.adaptive) {
    const long n = std::max<long>(1, static_cast<long>(std::ceil(
                                         t_f / h_time - 1e-12)));
    const double h = 1.0 / static_cast<double>(n);
    for (long k = 0; k < n; ++k) {
      const double u0 = static_cast<double>(k) * h;
      const double um = (static_cast<double>(k) + 0.5) * h;
      const double u1 = static_cast<double>(k + 1) * h;
      if (lawson) {
        const LawsonFrame frame(ctx.stage(s_of_u(um)));
        const ComplexMatrix s0 = frame.to_frame(rho);
        const ComplexMatrix k1 = f_frame(frame, u0, h, 0.0, s0);
        const ComplexMatrix k2 = f_frame(frame, u0, h, 0.5, s0 + (0.5 * h) * k1);
        const ComplexMatrix k3 = f_frame(frame, u0, h, 0.5, s0 + (0.5 * h) * k2);
        const ComplexMatrix k4 = f_frame(frame, u0, h, 1.0, s0 + h * k3);
        ComplexMatrix s1 = s0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        frame.phases(s1, h * t_f, true);
        rho = frame.from_frame(s1);
      } else {
        const ComplexMatrix k1 = f_plain(u0, rho);
        const ComplexMatrix k2 = f_plain(um, rho + (0.5 * h) * k1);
        const ComplexMatrix k3 = f_plain(um, rho + (0.5 * h) * k2);
        const ComplexMatrix k4 = f_plain(u1, rho + h * k3);
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      state.diag.rhs_evaluations += 4;
      ++state.diag.steps;
      after_step(ctx, rho, u1, s_of_u(u1), state.diag.steps, k + 1 == n,
                 state);
    }
    return;
  }

  // Embedded Cash-Karp 4(5) with per-entry error control, in the same frame.
  static const double a21 = 1.0 / 5.0;
  static const double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static const double a41 = 3.0 / 10.0, a42 = -9.0 / 10.0, a43 = 6.0 / 5.0;
  static const double a51 = -11.0 / 54.0, a52 = 5.0 / 2.0, a53 = -70.0 / 27.0,
                      a54 = 35.0 / 27.0;
  static const double a61 = 1631.0 / 55296.0, a62 = 175.0 / 512.0,
                      a63 = 575.0 / 13824.0, a64 = 44275.0 / 110592.0,
                      a65 = 253.0 / 4096.0;
  static const double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 3.0 / 5.0,
                      c5 = 1.0, c6 = 7.0 / 8.0;
  static const double b1 = 37.0 / 378.0, b3 = 250.0 / 621.0,
                      b4 = 125.0 / 594.0, b6 = 512.0 / 1771.0;
  static const double d1 = 2825.0 / 27648.0, d3 = 18575.0 / 48384.0,
                      d4 = 13525.0 / 55296.0, d5 = 277.0 / 14336.0,
                      d6 = 1.0 / 4.0;

  double u = 0.0;
  double h = std::min(1.0, h_time / std::max(t_f, h_time));
  const long max_steps = 20000000;
  long attempts = 0;
  while (u < 1.0) {
    h = std::min(h, 1.0 - u);
    if (h < 1e-15)
      throw EvolutionError("evolve: adaptive step underflow at u=" +
                           std::to_string(u));

    ComplexMatrix y0, five, four;
    const LawsonFrame* frame = nullptr;
    LawsonFrame frame_storage{ctx.stage(s_of_u(u + 0.5 * h))};
    if (lawson) {
      frame = &frame_storage;
      y0 = frame->to_frame(rho);
    } else {
      y0 = rho;
    }
    auto f = [&](double c, const ComplexMatrix& y) {
      return lawson ? f_frame(*frame, u, h, c, y)
                    : f_plain(u + c * h, y);
    };
    const ComplexMatrix k1 = f(0.0, y0);
    const ComplexMatrix k2 = f(c2, y0 + h * (a21 * k1));
    const ComplexMatrix k3 = f(c3, y0 + h * (a31 * k1 + a32 * k2));
    const ComplexMatrix k4 = f(c4, y0 + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const ComplexMatrix k5 =
        f(c5, y0 + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const ComplexMatrix k6 =
        f(c6,
          y0 + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    state.diag.rhs_evaluations += 6;

    five = y0 + h * (b1 * k1 + b3 * k3 + b4 * k4 + b6 * k6);
    four = y0 + h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6);

    double err = 0.0;
    for (int j = 0; j < five.cols(); ++j)
      for (int i = 0; i < five.rows(); ++i) {
        const double scale =
            cfg.step.abs_tol +
            cfg.step.rel_tol *
                std::max(std::abs(y0(i, j)), std::abs(five(i, j)));
        err = std::max(err, std::abs(five(i, j) - four(i, j)) / scale);
      }

    if (err <= 1.0) {
      if (lawson) {
        frame_storage.phases(five, h * t_f, true);
        rho = frame_storage.from_frame(five);
      } else {
        rho = five;
      }
      u += h;
      ++state.diag.steps;
      const bool last = u >= 1.0 - 1e-14;
      if (last) u = 1.0;
      after_step(ctx, rho, u, s_of_u(u), state.diag.steps, last, state);
      h *= std::clamp(0.9 * std::pow(std::max(err, 1e-12), -0.2), 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
    }
    if (++attempts > max_steps)
      throw EvolutionError("evolve: step budget exhausted");
  }
}

RunResult finalize(const EvolutionContext& ctx, DensityMatrix rho,
                   double s_obs, StepperState&& state,
                   std::chrono::steady_clock::time_point start) {
  RunResult result;
  result.rho_final = std::move(rho);
  result.residual_energy = residual_energy(result.rho_final, ctx.params());
  result.ground_population =
      ground_state_population(result.rho_final, ctx.stage(s_obs).d);
  result.diagnostics = state.diag;
  result.trajectory = std::move(state.trajectory);
  result.diagnostics.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace

RunResult evolve(const EvolutionContext& ctx) {
  const auto start = std::chrono::steady_clock::now();
  DensityMatrix rho = initial_state(ctx.params(), ctx.schedule());
  StepperState state;
  const double t_f = ctx.config().t_f;

  if (t_f == 0.0) {
    if (ctx.config().record_stride > 0)
      after_step(ctx, rho, 0.0, 1.0, 0, true, state);
    return finalize(ctx, std::move(rho), 1.0, std::move(state), start);
  }

  integrate(ctx, [](double u) { return u; }, rho, state);
  return finalize(ctx, std::move(rho), 1.0, std::move(state), start);
}

RunResult evolve(const ModelParams& params, const Schedule& sched,
                 const BathParams& bath, const EvolutionConfig& config) {
  EvolutionContext ctx(params, sched, bath, config);
  return evolve(ctx);
}

RunResult evolve_fixed_hamiltonian(const EvolutionContext& ctx, double s_hold,
                                   const DensityMatrix& rho0) {
  if (!(s_hold >= 0.0 && s_hold <= 1.0))
    throw std::invalid_argument("evolve_fixed_hamiltonian: s outside [0,1]");
  const auto start = std::chrono::steady_clock::now();
  DensityMatrix rho = rho0;
  StepperState state;
  const double t_f = ctx.config().t_f;

  if (t_f == 0.0)
    return finalize(ctx, std::move(rho), s_hold, std::move(state), start);

  integrate(ctx, [=](double) { return s_hold; }, rho, state);
  return finalize(ctx, std::move(rho), s_hold, std::move(state), start);
}

double residual_energy(const DensityMatrix& rho, const ModelParams& params) {
  const RealMatrix h1 = target_hamiltonian(params);
  double tr = 0.0;
  for (int i = 0; i < h1.rows(); ++i) tr += rho(i, i).real() * h1(i, i);
  return params.E + tr / params.N;
}

double ground_state_population(const DensityMatrix& rho,
                               const SpectralDecomposition& d) {
  const Eigen::VectorXd v0 = d.vectors.col(0);
  std::complex<double> acc = 0.0;
  for (int i = 0; i < d.dim(); ++i)
    for (int j = 0; j < d.dim(); ++j) acc += v0(i) * rho(i, j) * v0(j);
  return acc.real();
}

}  // namespace anneal
