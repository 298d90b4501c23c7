#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ddforge/density_matrix.hpp"

namespace ddforge {

// Lindblad operator normalisation for the pure-dephasing channel.
enum class CollapseConvention {
  sqrt_gamma,       // L_i = sqrt(gamma) sigma_z^(i)
  sqrt_half_gamma,  // L_i = sqrt(gamma / 2) sigma_z^(i)
};

enum class SwapFrame { lab, rotating };

// Two detuned qubits with flip-flop exchange,
//   H = w1/2 sz1 + w2/2 sz2 + J (|01><10| + |10><01|),
// frequencies in GHz and times in ns. Frequencies are converted to angular
// units (w = 2 pi f); gamma is used as given.
struct SwapModel {
  double f1 = 0.60;      // GHz
  double f2 = 0.62;      // GHz
  double J = 0.02;       // GHz
  double gamma = 0.001;  // 1/ns
  CollapseConvention collapse = CollapseConvention::sqrt_gamma;
  SwapFrame frame = SwapFrame::lab;
  // When false, J enters the Hamiltonian without the 2 pi factor.
  bool angular_coupling = true;

  void validate() const;
  double detuning() const;        // rad/ns, w2 - w1
  double coupling() const;        // rad/ns as it enters H
  double splitting() const;       // Omega = sqrt(delta^2 + 4 J^2), rad/ns
  Matrix4c hamiltonian() const;   // rad/ns
  Matrix4c rhs(const Matrix4c& rho) const;
};

struct SwapOptions {
  double dt = 0.01;  // ns, initial RK4 step
  // The step is halved until the estimated accumulated RK4 error on the
  // initial state stays below this bound over the whole run.
  double global_error_tol = 1e-10;
  double min_dt = 1e-6;
  double trace_tol = 1e-8;
};

struct SwapTrajectory {
  std::vector<double> times;  // ns
  std::vector<double> concurrence;
  std::vector<double> fidelity;  // with (|01> + |10>)/sqrt(2)
  std::vector<double> purity;
  std::vector<double> p01;
  std::vector<double> p00_plus_p11;
  std::vector<Matrix4c> states;
  double dt_used = 0.0;
  double max_trace_drift = 0.0;
};

// Classic RK4 on a uniform step that divides every output interval. Throws
// NumericalError with the observed drift if the trace moves by more than
// trace_tol or the step cannot be refined below min_dt.
SwapTrajectory evolve_swap(const SwapModel& model, const DensityMatrix4& rho0, std::span<const double> t_grid,
                           const SwapOptions& opt = {});

// Local maxima of a sampled signal, refined by a parabola through the three
// samples around each maximum. Returns (time, value) pairs.
struct Peak {
  double time = 0.0;
  double value = 0.0;
};
std::vector<Peak> find_peaks(std::span<const double> t, std::span<const double> y);
std::vector<Peak> find_troughs(std::span<const double> t, std::span<const double> y);

// Angular frequency 2 pi / <period> from consecutive peaks; nullopt with
// fewer than two peaks.
std::optional<double> oscillation_frequency(std::span<const double> t, std::span<const double> y);

// Time constant of the oscillation amplitude (peak minus mean of the
// neighbouring troughs) from a log-linear least-squares fit.
std::optional<double> envelope_time_constant(std::span<const double> t, std::span<const double> y);

}  // namespace ddforge
