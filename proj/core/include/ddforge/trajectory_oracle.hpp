#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ddforge/dd_sequences.hpp"
#include "ddforge/density_matrix.hpp"
#include "ddforge/noise_model.hpp"

namespace ddforge {

// Finite square pi pulses with a relative angle error: each pulse occupies
// [t_k - tau_p/2, t_k + tau_p/2] and rotates by (1 + eps) pi about its axis.
struct PulseErrorModel {
  double tau_p_ns = 0.0;
  double sigma_eps = 0.0;
  bool per_sequence_eps = false;  // one eps per qubit per trajectory
  bool frozen_noise = false;      // hold xi at its window-start value during a pulse

  void validate() const;
  bool ideal() const { return tau_p_ns == 0.0 && sigma_eps == 0.0; }
  double tau_p_us() const { return 1e-3 * tau_p_ns; }
};

enum class ConcurrenceMode { mean_state, per_trajectory };

struct EnsembleOptions {
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  std::size_t bootstrap = 200;
  ConcurrenceMode concurrence = ConcurrenceMode::mean_state;
  double max_dt = 0.0;  // us; 0 selects min(tau_c/200, tau_p/10, T/2000)
};

// States are reported in the toggling frame of the ideal control, so an
// error-free sequence leaves the Bell state fixed.
struct EnsembleResult {
  std::vector<double> times;  // us
  std::vector<Matrix4c> mean_states;
  std::vector<std::vector<Matrix4c>> replicate_states;  // [replicate][time], Poisson(1) bootstrap
  std::vector<double> trajectory_concurrence;           // per_trajectory mode only
  std::vector<std::vector<double>> replicate_trajectory_concurrence;
  ConcurrenceMode mode = ConcurrenceMode::mean_state;
  std::size_t n_traj = 0;
  double dt = 0.0;

  std::vector<double> concurrence, fidelity, concurrence_se, fidelity_se;
};

struct Traces {
  std::vector<double> concurrence, fidelity, concurrence_se, fidelity_se;
};

// C(t) and F(t) of the ensemble with bootstrap standard errors.
Traces extract_traces(const EnsembleResult& result);

// The state at each output time t is that of the sequence truncated at t.
// Phases are accumulated on OU paths with amplitude lambda_i = sqrt(2) sigma_i,
// for which the ensemble coherence converges to exp(-chi).
EnsembleResult run_ideal(const OUNoiseParams& params, const PulseSequence& seq, const DensityMatrix4& rho0,
                         std::span<const double> times, const EnsembleOptions& opt);

EnsembleResult run_with_errors(const OUNoiseParams& params, const PulseSequence& seq, const PulseErrorModel& err,
                               const DensityMatrix4& rho0, std::span<const double> times,
                               const EnsembleOptions& opt);

// Storage sweeps evaluate family(T) at T for each storage time. All cases
// share noise paths, eps draws (eps = sigma_eps z) and bootstrap weights,
// so differences between cases are not swamped by sampling noise.
struct SweepCase {
  SequenceFamily family;
  PulseErrorModel errors;
};

std::vector<EnsembleResult> run_storage_sweep(const OUNoiseParams& params, std::span<const SweepCase> cases,
                                              const DensityMatrix4& rho0, std::span<const double> storage_times,
                                              const EnsembleOptions& opt);

struct LifetimeEstimate {
  std::optional<double> value;  // us
  double std_error = 0.0;
  std::size_t replicates_crossed = 0;
  // Per bootstrap replicate, NaN where the replicate curve never crosses.
  // Replicates share weights across the cases of one sweep, so differences
  // between cases can be paired.
  std::vector<double> replicates;
};

// tau_C from the ensemble concurrence curve; the error is the spread over
// bootstrap replicates that cross 1/e.
LifetimeEstimate ensemble_tau_c(const EnsembleResult& result);

}  // namespace ddforge
