#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace anneal {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Problem instance of the fully connected p-spin ferromagnet, restricted to
/// the maximum-spin (Dicke) sector of dimension N+1. All energies are stored
/// in multiples of E and times in multiples of 1/E; E is kept as a field so
/// that outputs can be rescaled to physical units.
struct ModelParams {
  int N = 16;          ///< qubit count
  int p = 3;           ///< interaction order (>= 2)
  double E = 1.0;      ///< interaction energy scale
  double Gamma = 1.0;  ///< transverse field strength, in units of E

  ModelParams() = default;
  ModelParams(int n, int order, double e, double gamma);

  int dim() const { return N + 1; }

  /// For even p the target Hamiltonian has a two-fold degenerate ground
  /// state (m = +N/2 and m = -N/2 share the minimum).
  bool degenerate_target() const { return p % 2 == 0; }

  /// Throws std::invalid_argument when N < 1, p < 2, E <= 0 or Gamma < 0.
  void validate() const;
};

/// Annealing protocol: H(s) = A(s) H0 + B(s) H1 with A(0)=1, A(1)=0,
/// B(0)=0, B(1)=1, A non-increasing and B non-decreasing.
struct Schedule {
  std::function<double(double)> A;
  std::function<double(double)> B;
  std::string tag;  ///< provenance descriptor written to output files

  static Schedule linear();  ///< A(s) = 1-s, B(s) = s
};

/// Checks the endpoint identities exactly and monotonicity on a uniform grid
/// of the given resolution. Throws std::invalid_argument on violation.
void validate_schedule(const Schedule& sched, int grid_points = 257);

/// Collective spin operators in the Dicke basis |S=N/2, m>, with m running
/// from N/2 down to -N/2 (row 0 is the fully aligned ferromagnetic state).
RealMatrix collective_sz(int N);
RealMatrix collective_sx(int N);

/// H1 = -E N (2 Sz / N)^p, diagonal in the Dicke basis.
RealMatrix target_hamiltonian(const ModelParams& params);

/// H0 = -2 Gamma Sx, real symmetric tridiagonal.
RealMatrix driver_hamiltonian(const ModelParams& params);

/// H(s) = A(s) H0 + B(s) H1. Requires s in [0,1].
RealMatrix annealing_hamiltonian(const ModelParams& params,
                                 const Schedule& sched, double s);

/// System side of the bath coupling, sum_i sigma_z^i = 2 Sz (diagonal, 2m).
RealMatrix coupling_operator(int N);

}  // namespace anneal
