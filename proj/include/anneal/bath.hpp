#pragma once

#include <vector>

namespace anneal {

/// Ohmic environment J(w) = eta * w * exp(-w/wc) at inverse temperature beta.
/// The microscopic coupling g is absorbed into eta; the bath enters the
/// dynamics only through J and beta.
struct BathParams {
  double eta = 1e-3;     ///< dimensionless effective coupling
  double beta = 10.0;    ///< inverse temperature, units 1/E
  double omega_c = 50.0; ///< high-frequency cutoff, units E

  BathParams() = default;
  BathParams(double eta_, double beta_, double omega_c_);
  void validate() const;
};

/// J(w) for w >= 0. Negative w is rejected.
double spectral_density(double omega, const BathParams& bath);

/// Weak-coupling transition rate
///   gamma(w) = 2 pi eta w exp(-|w|/wc) / (1 - exp(-beta w)),
/// continued to gamma(0) = 2 pi eta / beta. Satisfies the KMS condition
/// gamma(-w) = exp(-beta w) gamma(w) and gamma >= 0 for all real w.
double rate(double omega, const BathParams& bath);

struct QuadratureConfig {
  double domain_factor = 40.0;  ///< integrate over |w'| <= domain_factor * wc
  double abs_tol = 1e-10;       ///< absolute tolerance of the adaptive rule
  double rel_tol = 1e-9;        ///< relative tolerance against panel estimates
  int max_depth = 48;           ///< recursion limit per panel
};

/// Lamb-shift coefficient
///   S(w) = (1/2pi) PV int gamma(w') / (w - w') dw'
/// computed by singularity subtraction plus adaptive Simpson panels split at
/// the integrand kinks. Throws std::runtime_error when the error estimate
/// does not reach abs_tol.
double lamb_shift_rate(double omega, const BathParams& bath,
                       const QuadratureConfig& quad = {});

/// S(w)/eta sampled on a uniform grid over [-omega_max, omega_max] with cubic
/// Hermite interpolation in between. S is exactly linear in eta, so one table
/// serves every coupling strength; callers multiply by eta. Used inside the
/// evolution loop where a fresh quadrature per Bohr frequency per step would
/// dominate the runtime.
class LambShiftTable {
 public:
  LambShiftTable() = default;
  LambShiftTable(const BathParams& bath, double omega_max, int points,
                 const QuadratureConfig& quad = {});

  /// Unit-coupling value S(omega)/eta.
  double operator()(double omega) const;
  bool empty() const { return values_.empty(); }
  double omega_max() const { return omega_max_; }

 private:
  double omega_max_ = 0.0;
  double step_ = 0.0;
  std::vector<double> values_;
};

}  // namespace anneal
