#include "anneal/bath.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anneal {

BathParams::BathParams(double eta_, double beta_, double omega_c_)
    : eta(eta_), beta(beta_), omega_c(omega_c_) {
  validate();
}

void BathParams::validate() const {
  if (!(eta >= 0.0)) throw std::invalid_argument("BathParams: eta must be >= 0");
  if (!(beta > 0.0)) throw std::invalid_argument("BathParams: beta must be > 0");
  if (!(omega_c > 0.0))
    throw std::invalid_argument("BathParams: omega_c must be > 0");
}

double spectral_density(double omega, const BathParams& bath) {
  if (omega < 0.0)
    throw std::invalid_argument("spectral_density: omega must be >= 0");
  return bath.eta * omega * std::exp(-omega / bath.omega_c);
}

namespace {

// x / (1 - exp(-x)), continued through x = 0. expm1 keeps the denominator
// exact to ulp near zero, which the KMS identity tests at 1e-12 relative.
double bose_weight(double x) {
  if (x == 0.0) return 1.0;
  return x / (-std::expm1(-x));
}

}  // namespace

double rate(double omega, const BathParams& bath) {
  const double pi = 3.14159265358979323846;
  return (2.0 * pi * bath.eta / bath.beta) *
         std::exp(-std::abs(omega) / bath.omega_c) *
         bose_weight(bath.beta * omega);
}

namespace {

struct PanelResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

// Adaptive Simpson with caller-supplied endpoint values (so one-sided limits
// can be injected at kinks) and a floor on the halved absolute tolerance (so
// floating-point noise in the integrand cannot force bottomless recursion).
struct SimpsonTol {
  double abs;
  double abs_floor;
  double rel;
};

template <typename F>
void adaptive_simpson(const F& f, double a, double fa, double b, double fb,
                      double m, double fm, double whole, SimpsonTol tol,
                      int depth, PanelResult& out) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double h6 = (b - a) / 12.0;
  const double left = h6 * (fa + 4.0 * flm + fm);
  const double right = h6 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  const double bound =
      std::max({tol.abs, tol.abs_floor, tol.rel * std::abs(left + right)});
  if (std::abs(delta) <= 15.0 * bound || depth <= 0) {
    out.value += left + right + delta / 15.0;
    out.error += std::abs(delta) / 15.0;
    if (depth <= 0 && std::abs(delta) > 15.0 * bound) out.converged = false;
    return;
  }
  SimpsonTol half = tol;
  half.abs = 0.5 * tol.abs;
  adaptive_simpson(f, a, fa, m, fm, lm, flm, left, half, depth - 1, out);
  adaptive_simpson(f, m, fm, b, fb, rm, frm, right, half, depth - 1, out);
}

template <typename F>
PanelResult integrate_with_endpoints(const F& f, double a, double fa, double b,
                                     double fb, double abs_tol, double rel_tol,
                                     int depth) {
  PanelResult out;
  if (a == b) return out;
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const SimpsonTol tol{abs_tol, abs_tol / 256.0, rel_tol};
  adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, depth, out);
  return out;
}

template <typename F>
PanelResult integrate(const F& f, double a, double b, double abs_tol,
                      double rel_tol, int depth) {
  if (a == b) return {};
  return integrate_with_endpoints(f, a, f(a), b, f(b), abs_tol, rel_tol,
                                  depth);
}

}  // namespace

double lamb_shift_rate(double omega, const BathParams& bath,
                       const QuadratureConfig& quad) {
  bath.validate();
  if (bath.eta == 0.0) return 0.0;
  const double pi = 3.14159265358979323846;
  const double big = quad.domain_factor * bath.omega_c;
  const double tol_total = 2.0 * pi * quad.abs_tol;

  auto plain = [&](double wp) { return rate(wp, bath) / (omega - wp); };

  double value = 0.0;
  bool converged = true;
  auto accumulate = [&](const PanelResult& r) {
    value += r.value;
    converged = converged && r.converged;
  };

  if (std::abs(omega) <= 1e-7) {
    // gamma has a derivative jump exactly at the singular point, so the
    // generic subtraction cannot work; use the series-stable quotient
    //   q(w') = (gamma(w') - gamma(0)) / (0 - w')
    // with its one-sided limits injected at w' = 0. The PV of the constant
    // gamma(0) vanishes over the symmetric window. Evaluating at the snapped
    // point w = 0 shifts S by O(|w| ln |w|), below the quadrature tolerance
    // for |w| <= 1e-7.
    const double pref = 2.0 * pi * bath.eta / bath.beta;
    const double beta = bath.beta, wc = bath.omega_c;
    auto q = [&](double wp) {
      const double aw = std::abs(wp);
      if (aw < 3e-5) {
        const double sgn = wp > 0.0 ? 1.0 : -1.0;
        // e^{-|w|/wc} f(beta w) - 1 expanded to second order
        const double lin = 0.5 * beta - sgn / wc;
        const double quad2 =
            beta * beta / 12.0 - sgn * beta / (2.0 * wc) + 0.5 / (wc * wc);
        return -pref * (lin + wp * quad2);
      }
      return (rate(wp, bath) - rate(0.0, bath)) / (-wp);
    };
    const double d = std::min(1.0, 0.5 * big);
    const double q_left = -pref * (0.5 * beta + 1.0 / wc);
    const double q_right = -pref * (0.5 * beta - 1.0 / wc);
    const double tol_each = tol_total / 4.0;
    accumulate(integrate_with_endpoints(q, -d, q(-d), 0.0, q_left, tol_each,
                                        quad.rel_tol, quad.max_depth));
    accumulate(integrate_with_endpoints(q, 0.0, q_right, d, q(d), tol_each,
                                        quad.rel_tol, quad.max_depth));
    auto plain0 = [&](double wp) { return rate(wp, bath) / (-wp); };
    accumulate(integrate(plain0, -big, -d, tol_each, quad.rel_tol,
                         quad.max_depth));
    accumulate(integrate(plain0, d, big, tol_each, quad.rel_tol,
                         quad.max_depth));
  } else if (std::abs(omega) < big) {
    // Symmetric window [w-d, w+d] about the singularity: the PV of the
    // subtracted constant gamma(w) cancels there, and outside it the plain
    // integrand decays exponentially. A small Taylor zone around w avoids
    // the cancellation noise of the subtracted quotient.
    const double gamma_w = rate(omega, bath);
    const double zone = std::min(1e-5, 0.5 * std::abs(omega));
    const double dgamma =
        (rate(omega + zone, bath) - rate(omega - zone, bath)) / (2.0 * zone);
    auto regular = [&](double wp) {
      if (std::abs(omega - wp) <= zone) return -dgamma;
      return (rate(wp, bath) - gamma_w) / (omega - wp);
    };

    const double d = std::min(1.0, 0.5 * (big - std::abs(omega)));
    const double wlo = omega - d;
    const double whi = omega + d;
    std::vector<std::pair<double, double>> window_panels;
    if (wlo < 0.0 && 0.0 < whi) {
      window_panels.emplace_back(wlo, 0.0);
      window_panels.emplace_back(0.0, whi);
    } else {
      window_panels.emplace_back(wlo, whi);
    }
    std::vector<std::pair<double, double>> plain_panels;
    auto add_plain = [&](double a, double b) {
      if (a >= b) return;
      if (a < 0.0 && 0.0 < b) {
        plain_panels.emplace_back(a, 0.0);
        plain_panels.emplace_back(0.0, b);
      } else {
        plain_panels.emplace_back(a, b);
      }
    };
    add_plain(-big, wlo);
    add_plain(whi, big);

    const double tol_each =
        tol_total / static_cast<double>(window_panels.size() +
                                        plain_panels.size());
    for (const auto& [a, b] : window_panels)
      accumulate(
          integrate(regular, a, b, tol_each, quad.rel_tol, quad.max_depth));
    for (const auto& [a, b] : plain_panels)
      accumulate(
          integrate(plain, a, b, tol_each, quad.rel_tol, quad.max_depth));
  } else {
    // singularity outside the integration domain
    accumulate(integrate(plain, -big, 0.0, 0.5 * tol_total, quad.rel_tol,
                         quad.max_depth));
    accumulate(integrate(plain, 0.0, big, 0.5 * tol_total, quad.rel_tol,
                         quad.max_depth));
  }

  if (!converged)
    throw std::runtime_error(
        "lamb_shift_rate: quadrature failed to reach requested tolerance");
  return value / (2.0 * pi);
}

LambShiftTable::LambShiftTable(const BathParams& bath, double omega_max,
                               int points, const QuadratureConfig& quad) {
  bath.validate();
  if (!(omega_max > 0.0))
    throw std::invalid_argument("LambShiftTable: omega_max must be > 0");
  if (points < 4)
    throw std::invalid_argument("LambShiftTable: need at least 4 points");
  omega_max_ = omega_max;
  step_ = 2.0 * omega_max / (points - 1);
  values_.resize(points);
  BathParams unit = bath;
  unit.eta = 1.0;
  bool failed = false;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
  for (int i = 0; i < points; ++i) {
    try {
      const double w = -omega_max_ + step_ * i;
      values_[i] = lamb_shift_rate(w, unit, quad);
    } catch (const std::exception&) {
      failed = true;
    }
  }
  if (failed)
    throw std::runtime_error(
        "LambShiftTable: quadrature failed while sampling the grid");
}

double LambShiftTable::operator()(double omega) const {
  if (values_.empty())
    throw std::logic_error("LambShiftTable: lookup on an empty table");
  const int n = static_cast<int>(values_.size());
  double x = (omega + omega_max_) / step_;
  x = std::clamp(x, 0.0, static_cast<double>(n - 1));
  int i = std::min(static_cast<int>(x), n - 2);
  const double t = x - i;
  const double p0 = values_[i];
  const double p1 = values_[i + 1];
  const double m0 =
      (i > 0) ? 0.5 * (values_[i + 1] - values_[i - 1]) : p1 - p0;
  const double m1 =
      (i + 2 < n) ? 0.5 * (values_[i + 2] - values_[i]) : p1 - p0;
  const double t2 = t * t;
  const double t3 = t2 * t;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * p0 + (t3 - 2.0 * t2 + t) * m0 +
         (-2.0 * t3 + 3.0 * t2) * p1 + (t3 - t2) * m1;
}

}  // namespace anneal
