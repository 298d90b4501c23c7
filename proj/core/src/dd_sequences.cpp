#include "ddforge/dd_sequences.hpp"

#include <cmath>
#include <json.hpp>

#include "ddforge/error.hpp"

namespace ddforge {

std::string_view to_string(PulseAxis axis) { return axis == PulseAxis::X ? "X" : "Y"; }

PulseAxis parse_axis(std::string_view text) {
  if (text == "X" || text == "x") return PulseAxis::X;
  if (text == "Y" || text == "y") return PulseAxis::Y;
  throw InvalidArgument("unknown pulse axis '" + std::string(text) + "' (expected X or Y)");
}

PulseSequence::PulseSequence(double total_time, std::array<EventList, 2> events)
    : total_time_(total_time), events_(std::move(events)) {
  require(std::isfinite(total_time_) && total_time_ > 0.0, "sequence length T must be > 0");
  for (const auto& list : events_) {
    double prev = 0.0;
    for (const auto& e : list) {
      require(std::isfinite(e.time) && e.time > 0.0 && e.time < total_time_,
              "pulse time " + std::to_string(e.time) + " outside (0, T)");
      require(e.time > prev, "pulse times must be strictly increasing");
      require(std::isfinite(e.nominal_angle), "pulse angle must be finite");
      prev = e.time;
    }
  }
}

std::size_t PulseSequence::max_pulse_count() const {
  return std::max(events_[0].size(), events_[1].size());
}

std::vector<double> PulseSequence::times(int qubit) const {
  std::vector<double> out;
  for (const auto& e : events_.at(qubit)) out.push_back(e.time);
  return out;
}

PulseSequence PulseSequence::truncated(double t) const {
  require(t > 0.0 && t <= total_time_, "truncation time must be in (0, T]");
  std::array<EventList, 2> kept;
  for (int q = 0; q < 2; ++q) {
    for (const auto& e : events_[q]) {
      if (e.time < t) kept[q].push_back(e);
    }
  }
  return PulseSequence(t, std::move(kept));
}

namespace {

PulseSequence both_qubits(double total_time, const std::vector<double>& times,
                          const std::vector<PulseAxis>& pattern) {
  PulseSequence::EventList list;
  list.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const PulseAxis axis = pattern.empty() ? PulseAxis::X : pattern[k % pattern.size()];
    list.push_back({times[k], axis, std::numbers::pi});
  }
  return PulseSequence(total_time, {list, list});
}

std::vector<double> equally_spaced(int n, double total_time) {
  std::vector<double> t(n);
  for (int k = 1; k <= n; ++k) t[k - 1] = (k - 0.5) * total_time / n;
  return t;
}

}  // namespace

PulseSequence free_evolution(double total_time) { return PulseSequence(total_time, {}); }

PulseSequence cpmg(int n_pulses, double total_time) {
  require(n_pulses >= 1, "cpmg: pulse count must be >= 1 (use free_evolution for none)");
  return both_qubits(total_time, equally_spaced(n_pulses, total_time), {});
}

PulseSequence udd(int n_pulses, double total_time) {
  require(n_pulses >= 1, "udd: pulse count must be >= 1");
  std::vector<double> t(n_pulses);
  for (int j = 1; j <= n_pulses; ++j) {
    const double s = std::sin(j * std::numbers::pi / (2.0 * n_pulses + 2.0));
    t[j - 1] = total_time * s * s;
  }
  return both_qubits(total_time, t, {});
}

const std::vector<PulseAxis>& xy8_axis_pattern() {
  using enum PulseAxis;
  static const std::vector<PulseAxis> pattern{X, Y, X, Y, Y, X, Y, X};
  return pattern;
}

PulseSequence xy8(double total_time, int repetitions) {
  require(repetitions >= 1, "xy8: repetitions must be >= 1");
  return both_qubits(total_time, equally_spaced(8 * repetitions, total_time), xy8_axis_pattern());
}

PulseSequence heisenberg_weyl_cycle(double total_time) {
  return both_qubits(total_time, {0.25 * total_time, 0.75 * total_time}, {});
}

PulseSequence custom(const std::array<std::vector<double>, 2>& times,
                     const std::array<std::vector<PulseAxis>, 2>& axes, double total_time) {
  std::array<PulseSequence::EventList, 2> events;
  for (int q = 0; q < 2; ++q) {
    require(axes[q].empty() || axes[q].size() == times[q].size(),
            "custom: axes list must be empty or match the pulse times");
    for (std::size_t k = 0; k < times[q].size(); ++k) {
      events[q].push_back({times[q][k], axes[q].empty() ? PulseAxis::X : axes[q][k], std::numbers::pi});
    }
  }
  return PulseSequence(total_time, std::move(events));
}

PulseSequence custom_symmetric(const std::vector<double>& times, double total_time,
                               const std::vector<PulseAxis>& axis_pattern) {
  return both_qubits(total_time, times, axis_pattern);
}

std::string to_json(const PulseSequence& seq, int indent) {
  nlohmann::ordered_json j;
  j["T_us"] = seq.total_time();
  j["qubits"] = nlohmann::ordered_json::array();
  for (int q = 0; q < 2; ++q) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& e : seq.events(q)) {
      nlohmann::ordered_json ev;
      ev["t_us"] = e.time;
      ev["axis"] = std::string(to_string(e.axis));
      if (e.nominal_angle != std::numbers::pi) ev["angle_rad"] = e.nominal_angle;
      list.push_back(std::move(ev));
    }
    j["qubits"].push_back(std::move(list));
  }
  return j.dump(indent);
}

PulseSequence sequence_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("sequence JSON: ") + e.what());
  }
  try {
    const double total = j.at("T_us").get<double>();
    const auto& qubits = j.at("qubits");
    require(qubits.is_array() && qubits.size() == 2, "sequence JSON: 'qubits' must hold two lists");
    std::array<PulseSequence::EventList, 2> events;
    for (int q = 0; q < 2; ++q) {
      for (const auto& ev : qubits[q]) {
        PulseEvent e;
        e.time = ev.at("t_us").get<double>();
        e.axis = parse_axis(ev.value("axis", std::string("X")));
        e.nominal_angle = ev.value("angle_rad", std::numbers::pi);
        events[q].push_back(e);
      }
    }
    return PulseSequence(total, std::move(events));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("sequence JSON: ") + e.what());
  }
}

}  // namespace ddforge

namespace ddforge {

SequenceFamily free_family() {
  return [](double t) { return free_evolution(t); };
}

SequenceFamily cpmg_family(int n_pulses) {
  require(n_pulses >= 1, "cpmg: pulse count must be >= 1");
  return [n_pulses](double t) { return cpmg(n_pulses, t); };
}

SequenceFamily udd_family(int n_pulses) {
  require(n_pulses >= 1, "udd: pulse count must be >= 1");
  return [n_pulses](double t) { return udd(n_pulses, t); };
}

SequenceFamily xy8_family(int repetitions) {
  require(repetitions >= 1, "xy8: repetitions must be >= 1");
  return [repetitions](double t) { return xy8(t, repetitions); };
}

SequenceFamily scaled_family(std::vector<double> normalized_times, std::vector<PulseAxis> axis_pattern) {
  double prev = 0.0;
  for (double u : normalized_times) {
    require(u > prev && u < 1.0, "normalised pulse times must be increasing inside (0, 1)");
    prev = u;
  }
  return [u = std::move(normalized_times), axes = std::move(axis_pattern)](double t) {
    std::vector<double> times(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) times[k] = u[k] * t;
    return custom_symmetric(times, t, axes);
  };
}

}  // namespace ddforge
