#pragma once

#include <array>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ddforge {

enum class PulseAxis { X, Y };

std::string_view to_string(PulseAxis axis);
PulseAxis parse_axis(std::string_view text);

struct PulseEvent {
  double time = 0.0;  // us, strictly inside (0, T)
  PulseAxis axis = PulseAxis::X;
  double nominal_angle = std::numbers::pi;

  bool operator==(const PulseEvent&) const = default;
};

// Per-qubit ordered pi-pulse events over a storage window [0, T].
//
// Axes only matter to the finite-pulse error simulator; for ideal pulses the
// modulation function depends on the pulse times alone.
class PulseSequence {
 public:
  using EventList = std::vector<PulseEvent>;

  // Throws InvalidArgument unless T > 0 and every event lies in (0, T) with
  // strictly increasing times per qubit.
  PulseSequence(double total_time, std::array<EventList, 2> events);

  double total_time() const { return total_time_; }
  std::span<const PulseEvent> events(int qubit) const { return events_.at(qubit); }
  std::size_t pulse_count(int qubit) const { return events_.at(qubit).size(); }
  std::size_t max_pulse_count() const;
  std::vector<double> times(int qubit) const;

  // The first `t` of the sequence: events with time < t, window [0, t].
  PulseSequence truncated(double t) const;

  bool operator==(const PulseSequence&) const = default;

 private:
  double total_time_;
  std::array<EventList, 2> events_;
};

PulseSequence free_evolution(double total_time);

// t_k = (k - 1/2) T / N, axis X, identical on both qubits.
PulseSequence cpmg(int n_pulses, double total_time);

// t_j = T sin^2(j pi / (2N + 2)), axis X, identical on both qubits.
PulseSequence udd(int n_pulses, double total_time);

// 8 * repetitions pulses at CPMG timing with axes XYXYYXYX per block.
PulseSequence xy8(double total_time, int repetitions);

// Symmetrised two-qubit cycle: each qubit is flipped at T/4 and 3T/4 so that
// the modulation integrates to zero on both qubits and the first-order
// average of sigma_z^(1), sigma_z^(2) vanishes.
PulseSequence heisenberg_weyl_cycle(double total_time);

// Per-qubit pulse times and axes as given. An empty axes list means all X.
PulseSequence custom(const std::array<std::vector<double>, 2>& times,
                     const std::array<std::vector<PulseAxis>, 2>& axes, double total_time);

// Same times on both qubits; axes cycle through `axis_pattern` (default X).
PulseSequence custom_symmetric(const std::vector<double>& times, double total_time,
                               const std::vector<PulseAxis>& axis_pattern = {});

// The XY-8 axis pattern, reused for any pulse count.
const std::vector<PulseAxis>& xy8_axis_pattern();

// Wire format: {"T_us": T, "qubits": [[{"t_us": t, "axis": "X"}, ...], [...]]}.
// "angle_rad" is optional on input and written only when it differs from pi.
std::string to_json(const PulseSequence& seq, int indent = 2);
PulseSequence sequence_from_json(std::string_view text);

// A protocol evaluated at a variable storage time: T -> sequence over [0, T].
using SequenceFamily = std::function<PulseSequence(double)>;

SequenceFamily free_family();
SequenceFamily cpmg_family(int n_pulses);
SequenceFamily udd_family(int n_pulses);
SequenceFamily xy8_family(int repetitions);
// Fixed normalised times t_k / T, identical on both qubits.
SequenceFamily scaled_family(std::vector<double> normalized_times, std::vector<PulseAxis> axis_pattern = {});

}  // namespace ddforge
