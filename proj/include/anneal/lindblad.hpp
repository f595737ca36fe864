#pragma once

#include "anneal/bath.hpp"
#include "anneal/model.hpp"
#include "anneal/spectral.hpp"

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace anneal {

using DensityMatrix = ComplexMatrix;

/// |Tr rho - 1|
double trace_error(const DensityMatrix& rho);
/// max-entry norm of rho - rho^dag
double hermiticity_defect(const DensityMatrix& rho);
/// smallest eigenvalue of the Hermitized matrix
double min_eigenvalue(const DensityMatrix& rho);

struct StepControl {
  bool adaptive = false;
  /// fixed step in time units; 0 selects the default min(0.025/E, t_f/2000)
  double h = 0.0;
  /// adaptive mode: per-entry error control |err_ij| <= abs + rel*|rho_ij|
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  /// integrate the Lawson-transformed variable sigma = E rho E^dag with the
  /// instantaneous diagonal phases pulled out exactly; plain stepping on rho
  /// is kept as a cross-check
  bool lawson_frame = true;
};

struct EvolutionConfig {
  double t_f = 0.0;  ///< annealing time, units 1/E; 0 short-circuits
  StepControl step;
  bool lamb_shift_enabled = true;
  /// compute S(omega) by direct quadrature per stage instead of the table;
  /// exact but slow, intended for small test systems
  bool lamb_shift_exact = false;
  double tol_omega = kDefaultTolOmega;
  int record_stride = 0;  ///< trajectory sampling interval in steps; 0 = off
  int invariant_check_stride = 1;
  /// hard abort bounds; a breach means step control is too loose
  double max_trace_error = 1e-6;
  double min_eigenvalue_floor = -1e-4;
  int lamb_table_points = 8193;
  QuadratureConfig lamb_quad = {};
};

struct TrajectoryPoint {
  double s;
  double epsilon;
  double ground_population;
  double trace_err;
  double min_eig;
};

struct RunDiagnostics {
  double max_trace_error = 0.0;
  double min_eigenvalue = 1.0;
  double max_hermiticity_drift = 0.0;
  long steps = 0;
  long rhs_evaluations = 0;
  double wall_seconds = 0.0;
};

struct RunResult {
  DensityMatrix rho_final;
  double residual_energy = 0.0;
  double ground_population = 0.0;
  RunDiagnostics diagnostics;
  std::vector<TrajectoryPoint> trajectory;
};

/// Raised when a run breaches the hard invariant bounds or the stepper
/// cannot make progress.
class EvolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// rho(0) = |g0><g0| with |g0> the gauge-fixed ground state of H(0).
/// Throws EvolutionError when the ground level of H(0) is degenerate.
DensityMatrix initial_state(const ModelParams& params, const Schedule& sched);

/// Everything the generator needs at one value of s, in the instantaneous
/// eigenbasis of H(s).
struct GeneratorStage {
  SpectralDecomposition d;
  FlatBins bins;
  std::vector<double> rates;  ///< gamma(omega) per bin
  RealMatrix h_ls;            ///< Lamb-shift Hamiltonian; empty when disabled
  bool has_lamb_shift = false;
};

/// Reused buffers of the right-hand-side evaluation.
struct RhsWorkspace {
  RealMatrix t1, re, im;
  ComplexMatrix r, dr;
};

/// Per-run state shared by the stepper: model operators, bath, the Lamb-shift
/// table and a small cache of generator stages keyed on s (the RK stages of
/// one step revisit the same s values). Not safe to share across threads;
/// distinct runs build distinct contexts.
class EvolutionContext {
 public:
  EvolutionContext(const ModelParams& params, const Schedule& sched,
                   const BathParams& bath, const EvolutionConfig& config,
                   std::shared_ptr<const LambShiftTable> shared_table = {});

  const GeneratorStage& stage(double s) const;
  RhsWorkspace& workspace() const { return workspace_; }

  const ModelParams& params() const { return params_; }
  const Schedule& schedule() const { return schedule_; }
  const BathParams& bath() const { return bath_; }
  const EvolutionConfig& config() const { return config_; }
  const RealMatrix& coupling() const { return coupling_; }

  /// Test hook, applied to each fresh decomposition after gauge fixing.
  std::function<void(SpectralDecomposition&)> gauge_hook;

  /// Largest |omega| the Lamb-shift table must cover for these parameters.
  static double omega_bound(const ModelParams& params);

 private:
  ModelParams params_;
  Schedule schedule_;
  BathParams bath_;
  EvolutionConfig config_;
  RealMatrix h0_, h1_, coupling_;
  std::shared_ptr<const LambShiftTable> table_;

  struct CacheSlot {
    double s = -1.0;
    bool valid = false;
    GeneratorStage stage;
  };
  mutable std::vector<CacheSlot> cache_;
  mutable int cache_clock_ = 0;
  mutable RhsWorkspace workspace_;
};

/// D[rho] = sum_omega gamma(omega) (L rho L^dag - 1/2 {L^dag L, rho}),
/// with rho and spec expressed in the same (eigen)basis.
ComplexMatrix dissipator(const ComplexMatrix& rho_eig, const BohrSpectrum& spec,
                         const BathParams& bath);

/// H_LS = sum_omega S(omega) L^dag L in the eigenbasis, by direct quadrature.
RealMatrix lamb_shift_hamiltonian(const BohrSpectrum& spec,
                                  const BathParams& bath,
                                  const QuadratureConfig& quad = {});
/// Same, with S(omega) read from a unit-coupling table and scaled by eta.
RealMatrix lamb_shift_hamiltonian(const BohrSpectrum& spec,
                                  const BathParams& bath,
                                  const LambShiftTable& table);

/// Full right-hand side drho/dt = i[rho, H(s)+H_LS(s)] + D[rho] in the fixed
/// Dicke basis. The returned derivative is with respect to t; integrating in
/// s requires the factor t_f.
ComplexMatrix lindblad_rhs(const DensityMatrix& rho, double s,
                           const EvolutionContext& ctx);

/// Integrates the master equation from s=0 to s=1.
RunResult evolve(const ModelParams& params, const Schedule& sched,
                 const BathParams& bath, const EvolutionConfig& config);
RunResult evolve(const EvolutionContext& ctx);

/// Integrates for a time t_f with H frozen at s_hold, starting from rho0.
/// ground_population is reported against the held Hamiltonian's ground state;
/// residual_energy is still measured against H1. Used for thermalization
/// studies and resumable segment stepping.
RunResult evolve_fixed_hamiltonian(const EvolutionContext& ctx, double s_hold,
                                   const DensityMatrix& rho0);

/// epsilon = E + Tr[rho H1] / N
double residual_energy(const DensityMatrix& rho, const ModelParams& params);

/// Tr[rho P0] with P0 the projector on d's ground state.
double ground_state_population(const DensityMatrix& rho,
                               const SpectralDecomposition& d);

}  // namespace anneal
