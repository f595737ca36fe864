#include "anneal/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace anneal {

ModelParams::ModelParams(int n, int order, double e, double gamma)
    : N(n), p(order), E(e), Gamma(gamma) {
  validate();
}

void ModelParams::validate() const {
  if (N < 1) throw std::invalid_argument("ModelParams: N must be >= 1");
  if (p < 2) throw std::invalid_argument("ModelParams: p must be >= 2");
  if (!(E > 0.0)) throw std::invalid_argument("ModelParams: E must be > 0");
  if (!(Gamma >= 0.0))
    throw std::invalid_argument("ModelParams: Gamma must be >= 0");
}

Schedule Schedule::linear() {
  Schedule sched;
  sched.A = [](double s) { return 1.0 - s; };
  sched.B = [](double s) { return s; };
  sched.tag = "linear";
  return sched;
}

void validate_schedule(const Schedule& sched, int grid_points) {
  if (!sched.A || !sched.B)
    throw std::invalid_argument("Schedule: A and B must be set");
  if (grid_points < 2)
    throw std::invalid_argument("Schedule: grid_points must be >= 2");
  if (sched.A(0.0) != 1.0 || sched.A(1.0) != 0.0 || sched.B(0.0) != 0.0 ||
      sched.B(1.0) != 1.0)
    throw std::invalid_argument("Schedule: endpoint identities violated");
  double prev_a = sched.A(0.0);
  double prev_b = sched.B(0.0);
  for (int i = 1; i < grid_points; ++i) {
    const double s = static_cast<double>(i) / (grid_points - 1);
    const double a = sched.A(s);
    const double b = sched.B(s);
    if (a > prev_a + 1e-15 || b < prev_b - 1e-15)
      throw std::invalid_argument("Schedule: monotonicity violated at s=" +
                                  std::to_string(s));
    prev_a = a;
    prev_b = b;
  }
}

RealMatrix collective_sz(int N) {
  if (N < 1) throw std::invalid_argument("collective_sz: N must be >= 1");
  const double S = 0.5 * N;
  RealMatrix sz = RealMatrix::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) sz(i, i) = S - i;
  return sz;
}

RealMatrix collective_sx(int N) {
  if (N < 1) throw std::invalid_argument("collective_sx: N must be >= 1");
  const double S = 0.5 * N;
  RealMatrix sx = RealMatrix::Zero(N + 1, N + 1);
  for (int i = 0; i < N; ++i) {
    // couples |m> and |m-1> with m = S - i
    const double m_hi = S - i;
    const double m_lo = m_hi - 1.0;
    const double v = 0.5 * std::sqrt(S * (S + 1.0) - m_hi * m_lo);
    sx(i, i + 1) = v;
    sx(i + 1, i) = v;
  }
  return sx;
}

namespace {
double int_pow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}
}  // namespace

RealMatrix target_hamiltonian(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  RealMatrix h1 = RealMatrix::Zero(N + 1, N + 1);
  for (int i = 0; i <= N; ++i) {
    const double m = 0.5 * N - i;
    h1(i, i) = -params.E * N * int_pow(2.0 * m / N, params.p);
  }
  return h1;
}

RealMatrix driver_hamiltonian(const ModelParams& params) {
  params.validate();
  return -2.0 * params.Gamma * collective_sx(params.N);
}

RealMatrix annealing_hamiltonian(const ModelParams& params,
                                 const Schedule& sched, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("annealing_hamiltonian: s outside [0,1]");
  return sched.A(s) * driver_hamiltonian(params) +
         sched.B(s) * target_hamiltonian(params);
}

RealMatrix coupling_operator(int N) {
  if (N < 1) throw std::invalid_argument("coupling_operator: N must be >= 1");
  return 2.0 * collective_sz(N);
}

}  // namespace anneal
