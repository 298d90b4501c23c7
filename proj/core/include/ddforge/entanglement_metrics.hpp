#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "ddforge/density_matrix.hpp"
#include "ddforge/filter_engine.hpp"

namespace ddforge {

struct BellMetrics {
  double concurrence = 1.0;
  double fidelity = 1.0;
};

// Bell state under pure dephasing: C = exp(-chi), F = (1 + exp(-chi)) / 2.
BellMetrics bell_concurrence_fidelity(double chi);

struct XState {
  double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;
  std::complex<double> coherence;  // rho_{01,10}

  void validate(double tol = 1e-12) const;
};

// max{0, 2 |rho_{01,10}| - 2 sqrt(p00 p11)}
double xstate_concurrence(const XState& x);

// Wootters concurrence max{0, mu_1 - mu_2 - mu_3 - mu_4}, mu_k the sorted
// square roots of the eigenvalues of rho (sy x sy) rho^* (sy x sy). Throws
// InvalidArgument if rho has an eigenvalue below -psd_tol.
double concurrence_general(const Matrix4c& rho, double psd_tol = 1e-9);
double concurrence_general(const DensityMatrix4& rho);

double bell_fidelity(const Matrix4c& rho);  // <Psi+| rho |Psi+>

// Time at which a sampled curve first drops below `threshold`, located by
// bisection on the monotone cubic (Fritsch-Carlson) interpolant. nullopt when
// the curve stays at or above the threshold over the sampled window. Throws
// NumericalError on non-finite samples and InvalidArgument on bad grids.
std::optional<double> first_crossing(std::span<const double> times, std::span<const double> values,
                                     double threshold);

// Monotone cubic interpolant; exposed for tests.
class MonotoneCubic {
 public:
  MonotoneCubic(std::span<const double> x, std::span<const double> y);
  double operator()(double x) const;

 private:
  std::vector<double> x_, y_, d_;
};

inline constexpr double kConcurrenceThreshold = 0.36787944117144233;  // 1/e
inline constexpr double kFidelityThreshold = 0.999;

struct LifetimeReport {
  std::optional<double> tau_c;   // C(tau_C) = 1/e
  std::optional<double> t_0999;  // F(T_0.999) = 0.999
  double window_end = 0.0;
};

LifetimeReport lifetimes(std::span<const double> times, std::span<const double> concurrence,
                         std::span<const double> fidelity);
LifetimeReport lifetimes(const DephasingCurve& curve);

struct LifetimeScan {
  double initial_window = 1.0;  // us
  double max_window = 1e4;      // us
  std::size_t points = 400;
};

// Scans chi(T) for the protocol family on [0, window] with the exact
// time-domain route, doubling the window until both thresholds are crossed
// or max_window is reached.
LifetimeReport protocol_lifetimes(const OUNoiseParams& noise, const SequenceFamily& family,
                                  const CoherencePair& pair, const LifetimeScan& scan = {});

}  // namespace ddforge
