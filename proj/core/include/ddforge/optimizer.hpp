#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddforge/dd_sequences.hpp"
#include "ddforge/filter_engine.hpp"
#include "ddforge/noise_model.hpp"

namespace ddforge {

enum class CostMethod { frequency_domain, time_domain };

// Pulse times 0 < t_1 < ... < t_N < T*, identical on both qubits.
struct OptimizationProblem {
  int n_pulses = 8;
  double t_star = 1.0;  // us
  OUNoiseParams noise;
  CoherencePair pair = CoherencePair::bell();
  double min_gap = 0.0;  // us, between pulses and to the window edges
  std::vector<PulseAxis> axis_pattern;  // axes of the emitted sequence; the cost ignores them
  CostMethod method = CostMethod::frequency_domain;

  void validate() const;
  bool feasible(std::span<const double> times) const;
  PulseSequence sequence(std::span<const double> times) const;
};

// J[t] = chi(T*) of the sequence for the configured coherence pair.
double cost(const OptimizationProblem& problem, std::span<const double> times);

std::vector<double> equally_spaced_times(int n, double t_star);

// Softmax gap map: N + 1 gaps g_j = m + (T* - (N + 1) m) softmax(u)_j with
// u_0 = 0, so the N free parameters give strictly ordered feasible times.
std::vector<double> times_from_parameters(std::span<const double> u, double t_star, double min_gap);
std::vector<double> parameters_from_times(std::span<const double> times, double t_star, double min_gap);

struct NelderMeadConfig {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_edge = 0.05;  // in parameter space
  double rel_tol = 1e-10;      // stop when cost spread < rel_tol * J0
  int max_iterations = 2000;
  int restarts = 0;            // extra starts from perturbed initial points
  double restart_spread = 0.3;
};

struct TracePoint {
  int start = 0;
  int iteration = 0;
  double cost = 0.0;  // best simplex cost after the iteration
};

struct OptimizationReport {
  std::vector<double> times;
  double cost = 0.0;
  double initial_cost = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<TracePoint> trace;
};

// Nelder-Mead from the equally spaced guess. The best iterate is always
// returned; `converged` is false when the iteration limit was hit. Of the two
// mirror-image optima the one with t_1 <= T* - t_N is reported.
OptimizationReport optimize(const OptimizationProblem& problem, const NelderMeadConfig& config = {},
                            std::uint64_t seed = 1);

enum class Protocol { no_dd, cpmg, udd, xy8, tls_opt };

inline constexpr Protocol kAllProtocols[] = {Protocol::no_dd, Protocol::cpmg, Protocol::udd, Protocol::xy8,
                                             Protocol::tls_opt};

// Display names such as "CPMG-8"; parse accepts no-dd, cpmg, udd, xy8, tls-opt.
std::string protocol_name(Protocol p, int n_pulses);
std::string_view protocol_key(Protocol p);
Protocol parse_protocol(std::string_view key);

// N pulses at CPMG timing for CPMG and XY (axes cycling XYXYYXYX), UDD
// timing for UDD, and the given normalised times with XY-8 axes for TLS-opt.
SequenceFamily protocol_family(Protocol p, int n_pulses, std::span<const double> tls_normalized_times = {});

struct ProtocolSummary {
  std::string name;
  double chi = 0.0;  // at T*
  double concurrence = 1.0;
  double fidelity = 1.0;
  std::optional<double> tau_c;   // us
  std::optional<double> t_0999;  // us
};

// no-DD, CPMG-N, UDD-N, XY-8 and TLS-opt at T*. Lifetimes scale each
// protocol's normalised pattern to the storage time. TLS-opt uses the given
// normalised times, or runs the optimizer when none are given.
std::vector<ProtocolSummary> compare_protocols(double t_star, int n_pulses, const OUNoiseParams& noise,
                                               const CoherencePair& pair = CoherencePair::bell(),
                                               std::optional<std::vector<double>> tls_normalized_times = {});

}  // namespace ddforge
