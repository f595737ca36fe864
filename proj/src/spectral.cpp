#include "anneal/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anneal {

void fix_gauge(RealMatrix& vectors) {
  for (int j = 0; j < vectors.cols(); ++j) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < vectors.rows(); ++i) {
      const double a = std::abs(vectors(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    if (vectors(imax, j) < 0.0) vectors.col(j) = -vectors.col(j);
  }
}

SpectralDecomposition eigendecompose(const RealMatrix& H, double s) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(H);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigendecompose: eigensolver failed to converge");
  SpectralDecomposition d;
  d.s = s;
  d.energies = solver.eigenvalues();
  d.vectors = solver.eigenvectors();
  fix_gauge(d.vectors);
  return d;
}

double spectral_gap(const SpectralDecomposition& d) {
  if (d.dim() < 2)
    throw std::invalid_argument("spectral_gap: dimension must be >= 2");
  return d.energies(1) - d.energies(0);
}

GapScan scan_minimal_gap(const ModelParams& params, const Schedule& sched,
                         int grid_resolution, bool parallel) {
  params.validate();
  if (grid_resolution < 3)
    throw std::invalid_argument(
        "scan_minimal_gap: grid_resolution must be >= 3");

  const RealMatrix h0 = driver_hamiltonian(params);
  const RealMatrix h1 = target_hamiltonian(params);

  auto lowest_two = [&](double s, double& e0, double& e1) {
    const RealMatrix h = sched.A(s) * h0 + sched.B(s) * h1;
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("scan_minimal_gap: eigensolver failed at s=" +
                               std::to_string(s));
    e0 = solver.eigenvalues()(0);
    e1 = solver.eigenvalues()(1);
  };
  auto gap_at = [&](double s) {
    double e0, e1;
    lowest_two(s, e0, e1);
    return e1 - e0;
  };

  GapScan scan;
  const int n = grid_resolution;
  scan.grid.resize(n);
  scan.gap.resize(n);
  scan.e0.resize(n);
  scan.e1.resize(n);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#else
  (void)parallel;
#endif
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    scan.grid[i] = s;
    lowest_two(s, scan.e0[i], scan.e1[i]);
    scan.gap[i] = scan.e1[i] - scan.e0[i];
  }

  int imin = 0;
  for (int i = 1; i < n; ++i)
    if (scan.gap[i] < scan.gap[imin]) imin = i;

  // Golden-section refinement on the bracket around the coarse minimum,
  // tracking the best point seen across all evaluations so that min_gap can
  // never exceed a sampled gap.
  double s_best = scan.grid[imin];
  double f_best = scan.gap[imin];
  auto consider = [&](double s, double f) {
    if (f < f_best) {
      f_best = f;
      s_best = s;
    }
  };

  double lo = scan.grid[std::max(0, imin - 1)];
  double hi = scan.grid[std::min(n - 1, imin + 1)];
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = gap_at(x1);
  double f2 = gap_at(x2);
  consider(x1, f1);
  consider(x2, f2);
  while (hi - lo > 1e-6) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = gap_at(x1);
      consider(x1, f1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = gap_at(x2);
      consider(x2, f2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  consider(mid, gap_at(mid));
  scan.s_min = s_best;
  scan.min_gap = f_best;
  return scan;
}

void bohr_bins_flat(const SpectralDecomposition& d, const RealMatrix& A,
                    double tol_omega, FlatBins& out) {
  const int dim = d.dim();
  if (A.rows() != dim || A.cols() != dim)
    throw std::invalid_argument("bohr_spectrum: dimension mismatch");
  if (!(tol_omega > 0.0))
    throw std::invalid_argument("bohr_spectrum: tol_omega must be > 0");

  out.dim = dim;
  out.omega.clear();
  out.entry_off.clear();
  out.entries.clear();
  out.ldl_off.clear();
  out.ldl.clear();
  out.zero_bin = -1;

  out.scratch.a_eig.resize(static_cast<size_t>(dim) * dim);
  Eigen::Map<RealMatrix> a_eig(out.scratch.a_eig.data(), dim, dim);
  a_eig.noalias() = d.vectors.transpose() * A * d.vectors;

  auto& elements = out.scratch.elements;
  elements.clear();
  elements.reserve(static_cast<size_t>(dim) * dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      elements.push_back({d.energies(b) - d.energies(a), a, b, a_eig(a, b)});

  std::sort(elements.begin(), elements.end(),
            [](const FlatBins::Scratch::Element& x,
               const FlatBins::Scratch::Element& y) {
              if (x.omega != y.omega) return x.omega < y.omega;
              if (x.a != y.a) return x.a < y.a;
              return x.b < y.b;
            });

  out.entry_off.push_back(0);
  out.ldl_off.push_back(0);
  size_t i = 0;
  while (i < elements.size()) {
    size_t j = i + 1;
    while (j < elements.size() &&
           elements[j].omega - elements[j - 1].omega <= tol_omega)
      ++j;
    double sum = 0.0;
    const int first = out.entry_off.back();
    for (size_t k = i; k < j; ++k) {
      sum += elements[k].omega;
      out.entries.push_back({elements[k].a, elements[k].b, elements[k].v});
    }
    double omega = sum / static_cast<double>(j - i);
    if (std::abs(omega) <= tol_omega) omega = 0.0;
    out.omega.push_back(omega);
    out.entry_off.push_back(static_cast<int>(out.entries.size()));
    // L^dag L: contributions from entry pairs that share the sink index a.
    const int last = out.entry_off.back();
    for (int k = first; k < last; ++k)
      for (int l = first; l < last; ++l)
        if (out.entries[k].a == out.entries[l].a) {
          const double v = out.entries[k].v * out.entries[l].v;
          if (v != 0.0)
            out.ldl.push_back({out.entries[k].b, out.entries[l].b, v});
        }
    out.ldl_off.push_back(static_cast<int>(out.ldl.size()));
    i = j;
  }

  for (int k = 0; k < out.bins(); ++k)
    if (out.omega[k] == 0.0) out.zero_bin = k;
  if (out.zero_bin < 0) {
    // Diagonal pairs always produce omega = 0, so this is unreachable unless
    // tol_omega merged the zero group into a neighbor; keep the closest bin.
    double best = std::numeric_limits<double>::max();
    for (int k = 0; k < out.bins(); ++k)
      if (std::abs(out.omega[k]) < best) {
        best = std::abs(out.omega[k]);
        out.zero_bin = k;
      }
  }
}

BohrSpectrum bohr_spectrum(const SpectralDecomposition& d, const RealMatrix& A,
                           double tol_omega) {
  FlatBins flat;
  bohr_bins_flat(d, A, tol_omega, flat);
  BohrSpectrum spec;
  spec.tol_omega = tol_omega;
  spec.dim = flat.dim;
  spec.zero_bin = flat.zero_bin;
  spec.bins.resize(flat.bins());
  for (int k = 0; k < flat.bins(); ++k) {
    BohrBin& bin = spec.bins[k];
    bin.omega = flat.omega[k];
    bin.entries.assign(flat.entries.begin() + flat.entry_off[k],
                       flat.entries.begin() + flat.entry_off[k + 1]);
    bin.ldl.assign(flat.ldl.begin() + flat.ldl_off[k],
                   flat.ldl.begin() + flat.ldl_off[k + 1]);
  }
  return spec;
}

}  // namespace anneal
