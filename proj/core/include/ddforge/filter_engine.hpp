#pragma once

#include <array>
#include <complex>
#include <span>
#include <string_view>
#include <vector>

#include "ddforge/dd_sequences.hpp"
#include "ddforge/noise_model.hpp"
#include "ddforge/quadrature.hpp"

namespace ddforge {

// Piecewise-constant +-1 sign function on [0, T]: +1 on [0, t_1), then the
// sign alternates at every breakpoint.
class ModulationFunction {
 public:
  ModulationFunction(double total_time, std::vector<double> breakpoints);

  double total_time() const { return total_time_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::size_t flip_count() const { return breakpoints_.size(); }

  double value(double t) const;
  double signed_area() const;

  // Nodes tau_m (0, the breakpoints, T) and jump weights c_m such that
  //   Y(omega) = (1 / (i omega)) sum_m c_m exp(i omega tau_m).
  // Interior weights are +-2, the end points carry -1 and the final sign.
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& jumps() const { return jumps_; }

  bool operator==(const ModulationFunction& o) const {
    return total_time_ == o.total_time_ && breakpoints_ == o.breakpoints_;
  }

 private:
  double total_time_;
  std::vector<double> breakpoints_;
  std::vector<double> nodes_;
  std::vector<double> jumps_;
};

ModulationFunction modulation(const PulseSequence& seq, int qubit);

// Y(omega, T) = int_0^T y(t) exp(i omega t) dt, exact per constant-sign interval.
std::complex<double> window_transform(const ModulationFunction& y, double omega);

// F_ij(omega, T) = Y_i Y_j^*.
struct FilterMatrix {
  double f11 = 0.0;
  double f22 = 0.0;
  std::complex<double> f12;
};
FilterMatrix filter_matrix(const ModulationFunction& y1, const ModulationFunction& y2, double omega);

// Half-differences of the sigma_z eigenvalues of the two basis states of a
// coherence, matching the 1/2 in the dephasing Hamiltonian. The Bell
// coherence (|01>, |10>) has s = (+1, -1).
struct CoherencePair {
  std::array<int, 2> s{1, -1};

  static CoherencePair bell() { return {{1, -1}}; }
  static CoherencePair single(int qubit);
  static CoherencePair from_basis(int alpha, int beta);
  void validate() const;

  bool operator==(const CoherencePair&) const = default;
};

enum class ChiMethod { closed_form, quadrature, time_domain, pmme, monte_carlo };
std::string_view to_string(ChiMethod m);

// Sampled dephasing exponent: coherence(t) / coherence(0) = exp(-chi(t)).
struct DephasingCurve {
  std::vector<double> times;
  std::vector<double> chi;
  ChiMethod method = ChiMethod::closed_form;
};

// The exponent is normalised as chi = (1/pi) int_0^inf s^T (S o F) s d omega,
// which is the variance of the accumulated phase with the noise correlation
// C_ij; both routes reproduce lambda^2 tau_c (t - tau_c (1 - exp(-t/tau_c)))
// for a free-evolving qubit.

struct FrequencyDomainOptions {
  QuadratureControl quadrature{0.0, 1e-10, 400000};
  // Relative error above which the result is reported as non-convergent.
  double fail_rel_tol = 1e-6;
  // Upper integration limit is max(omega_tau_factor / tau_c, omega_t_factor / T);
  // the remainder is added analytically from the |Y|^2 envelope.
  double omega_tau_factor = 200.0;
  double omega_t_factor = 4000.0;
};

struct FrequencyDomainReport {
  double chi = 0.0;
  double quadrature_error = 0.0;
  double tail_envelope = 0.0;      // analytic remainder beyond omega_max
  double tail_bound = 0.0;         // bound on the oscillatory remainder
  double omega_max = 0.0;
  std::size_t evaluations = 0;
};

// Adaptive Gauss-Kronrod over panels split at 1/tau_c, at N pi / T and every
// 2 pi / T up to omega_max. Throws NumericalError if the error estimate
// exceeds fail_rel_tol |chi| (plus the roundoff floor).
FrequencyDomainReport chi_frequency_domain_report(const OUNoiseParams& noise, const PulseSequence& seq,
                                                  const CoherencePair& pair,
                                                  const FrequencyDomainOptions& opt = {});
double chi_frequency_domain(const OUNoiseParams& noise, const PulseSequence& seq, const CoherencePair& pair,
                            const FrequencyDomainOptions& opt = {});

// Exact double integral of the exponential kernel over the constant-sign
// rectangles, written through the jump representation:
//   chi = -sum_ij s_i s_j sigma_i sigma_j r_ij sum_mn c_m c_n Phi(tau_m - tau_n),
//   Phi(x) = tau_c (|x| - tau_c (1 - exp(-|x|/tau_c))).
double chi_time_domain(const OUNoiseParams& noise, const PulseSequence& seq, const CoherencePair& pair);

struct FreeEvolutionChi {
  std::array<double, 2> single{0.0, 0.0};  // chi_i^(1)(t)
  double bell = 0.0;                       // chi_1 + chi_2 - 2 rho sqrt(chi_1 chi_2)
};
FreeEvolutionChi chi_closed_form_free(const OUNoiseParams& noise, double t);

// d/dt of the free-evolution Bell exponent.
double gamma_inst(const OUNoiseParams& noise, double t);

// Long-time Bell dephasing rate Gamma_1 + Gamma_2 - 2 rho sqrt(Gamma_1 Gamma_2),
// Gamma_i = lambda_i^2 tau_c = S_ii(0).
double bell_markov_rate(const OUNoiseParams& noise);

// chi(T) for each storage time, with the sequence rebuilt per T.
DephasingCurve chi_curve(const OUNoiseParams& noise, const SequenceFamily& family, std::span<const double> times,
                         const CoherencePair& pair, ChiMethod method);

}  // namespace ddforge
