#pragma once

#include "anneal/model.hpp"

#include <string>
#include <vector>

namespace anneal {

/// Default tolerance used to group Bohr frequencies into bins, relative to
/// the unit energy scale: far below any physical splitting at the sizes this
/// simulator targets, far above eigensolver round-off.
inline constexpr double kDefaultTolOmega = 1e-9;

/// Instantaneous eigensystem of H(s). Columns of `vectors` are orthonormal
/// eigenvectors ordered by ascending energy. Gauge convention: in each
/// eigenvector the entry of largest magnitude (first such entry on ties) is
/// made positive, so outputs are deterministic.
struct SpectralDecomposition {
  double s = 0.0;
  Eigen::VectorXd energies;
  RealMatrix vectors;
  std::string gauge = "max-entry-positive";

  int dim() const { return static_cast<int>(energies.size()); }
};

/// Dense real-symmetric eigensolve with deterministic gauge fixing.
/// Throws std::runtime_error if the eigensolver fails to converge.
SpectralDecomposition eigendecompose(const RealMatrix& H, double s = 0.0);

/// Applies the max-entry-positive sign convention column by column.
void fix_gauge(RealMatrix& vectors);

/// epsilon_1 - epsilon_0 of a decomposition with dim >= 2.
double spectral_gap(const SpectralDecomposition& d);

struct GapScan {
  std::vector<double> grid;  ///< uniform s values of the coarse scan
  std::vector<double> gap;   ///< Delta(s) per grid point
  std::vector<double> e0;
  std::vector<double> e1;
  double min_gap = 0.0;  ///< refined minimum
  double s_min = 0.0;    ///< refined location of the minimum
};

/// Coarse uniform scan of Delta(s) followed by golden-section refinement
/// around the coarse minimum until the bracket is narrower than 1e-6.
/// The coarse grid is embarrassingly parallel; `parallel` selects the OpenMP
/// path, the serial path is kept as reference.
GapScan scan_minimal_gap(const ModelParams& params, const Schedule& sched,
                         int grid_resolution, bool parallel = true);

/// One jump map of the rotating-wave dissipator: the matrix elements of the
/// coupling operator between ordered eigenpairs (a,b) whose Bohr frequency
/// eps_b - eps_a falls in this bin. Entries are stored sparse because at a
/// generic s every off-diagonal bin holds exactly one element.
struct BohrBin {
  struct Entry {
    int a;
    int b;
    double v;
  };
  double omega = 0.0;
  std::vector<Entry> entries;  ///< L_omega(a,b) = v, eigenbasis indices
  std::vector<Entry> ldl;      ///< L^dag L as (row, col, value) triplets
};

struct BohrSpectrum {
  std::vector<BohrBin> bins;  ///< sorted ascending in omega
  double tol_omega = kDefaultTolOmega;
  int dim = 0;
  int zero_bin = -1;  ///< index of the bin containing omega = 0
};

/// Bins every ordered eigenpair frequency of `d` with tolerance tol_omega and
/// collects the jump maps of A (expressed in the same basis as d). All dim^2
/// matrix elements are kept, so the bins partition A in the eigenbasis
/// exactly: sum_omega L_omega = V^T A V.
BohrSpectrum bohr_spectrum(const SpectralDecomposition& d, const RealMatrix& A,
                           double tol_omega = kDefaultTolOmega);

/// Flat twin of BohrSpectrum used inside the evolution loop, where one
/// binning per stepper stage makes per-bin vectors too costly. Entry ranges
/// of bin k are [entry_off[k], entry_off[k+1]), likewise ldl_off. Buffers are
/// reused across rebuilds.
struct FlatBins {
  std::vector<double> omega;
  std::vector<int> entry_off;
  std::vector<BohrBin::Entry> entries;
  std::vector<int> ldl_off;
  std::vector<BohrBin::Entry> ldl;
  int zero_bin = -1;
  int dim = 0;

  int bins() const { return static_cast<int>(omega.size()); }

  struct Scratch {
    std::vector<double> a_eig;  // dense V^T A V, column-major
    struct Element {
      double omega;
      int a, b;
      double v;
    };
    std::vector<Element> elements;
  };
  Scratch scratch;
};

/// Single source of the binning logic; bohr_spectrum wraps this.
void bohr_bins_flat(const SpectralDecomposition& d, const RealMatrix& A,
                    double tol_omega, FlatBins& out);

}  // namespace anneal
