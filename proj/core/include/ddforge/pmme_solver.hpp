#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ddforge/density_matrix.hpp"
#include "ddforge/filter_engine.hpp"

namespace ddforge {

// Correlated Markovian dephasing
//   L rho = (gamma0 / 2) sum_ij R_ij (sz_i rho sz_j - {sz_i sz_j, rho} / 2).
struct DephasingLindbladian {
  double gamma0 = 0.0;  // 1/us
  Eigen::Matrix2d R = Eigen::Matrix2d::Identity();

  static DephasingLindbladian make(double gamma0, double rho);
  void validate() const;
  Matrix4c apply(const Matrix4c& rho) const;
};

// k(t) = exp(-t / tau_c) / tau_c for t >= 0.
struct MemoryKernel {
  double tau_c = 1.0;  // us

  void validate() const;
  double operator()(double t) const;
};

// Decay rate of each matrix element rho_ab under L, i.e. L(|a><b|) = -rate |a><b|.
// For half-difference vector s of the pair the rate is gamma0 s^T R s.
Eigen::Matrix4d lindblad_eigenrates(const DephasingLindbladian& L);
double coherence_rate(const DephasingLindbladian& L, const CoherencePair& pair);

// 16 x 16 matrix of L acting on column-major vec(rho).
Eigen::Matrix<cplx, 16, 16> superoperator(const DephasingLindbladian& L);

// Scalar PMME solution c(t)/c(0) for an eigenvalue -mu of L:
//   (exp(-mu t) - a exp(-t/tau_c)) / (1 - a),  a = mu tau_c,
// with the confluent form used near a = 1.
double pmme_scalar_solution(double mu, double tau_c, double t);

struct PmmeTrajectory {
  std::vector<double> times;
  std::vector<Matrix4c> states;
  double max_trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t positivity_violations = 0;  // states with an eigenvalue below -1e-8
};

inline constexpr double kPositivityTolerance = 1e-8;

PmmeTrajectory pmme_evolve_analytic(const DephasingLindbladian& L, const MemoryKernel& k, const DensityMatrix4& rho0,
                                    std::span<const double> times);

// Trapezoidal Volterra stepping on t_n = n dt up to T, with the history
// integral H(t) = int_0^t k(t - u) exp(L (t - u)) rho(u) du advanced
// recursively in O(1) per step. Requires dt <= tau_c / 50; throws
// NumericalError if the trace drifts by more than 1e-6.
PmmeTrajectory pmme_evolve_volterra(const DephasingLindbladian& L, const MemoryKernel& k, const DensityMatrix4& rho0,
                                    double dt, double T);

struct PmmeChi {
  DephasingCurve curve;            // method = pmme
  std::vector<double> gamma_inst;  // d chi / dt, central differences
};

// chi_PM(t) = -ln |rho_ab(t) / rho_ab(0)|; the curve stops before the first
// sample whose coherence drops below 1e-12.
PmmeChi chi_pm(const PmmeTrajectory& traj, int alpha, int beta);

}  // namespace ddforge
