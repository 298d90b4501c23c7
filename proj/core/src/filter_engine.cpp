#include "ddforge/filter_engine.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

#include "ddforge/density_matrix.hpp"
#include "ddforge/error.hpp"

namespace ddforge {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(x) / x with the removable singularity filled in.
double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// tau_c (|x| - tau_c (1 - exp(-|x| / tau_c))), the even second antiderivative
// of exp(-|x| / tau_c) with Phi(0) = 0.
double phi_kernel(double x, double tau_c) {
  const double a = std::abs(x);
  const double u = a / tau_c;
  if (u < 1e-3) {
    // a^2/2 - a^3/(6 tau_c) + a^4/(24 tau_c^2) - ...
    return a * a * (0.5 - u / 6.0 + u * u / 24.0 - u * u * u / 120.0);
  }
  return tau_c * (a + tau_c * std::expm1(-u));
}

// int_W^inf d omega / (omega^2 (1 + omega^2 tau^2)) = (1/W) (1 - atan(v)/v), v = 1/(W tau).
double lorentzian_envelope_tail(double w, double tau) {
  const double v = 1.0 / (w * tau);
  double bracket;
  if (v < 0.1) {
    const double v2 = v * v;
    bracket = v2 * (1.0 / 3.0 - v2 * (1.0 / 5.0 - v2 * (1.0 / 7.0 - v2 * (1.0 / 9.0 - v2 / 11.0))));
  } else {
    bracket = 1.0 - std::atan(v) / v;
  }
  return bracket / w;
}

// Coefficient of the Lorentzian in s^T (S o F) s for the (i, j) block.
std::array<std::array<double, 2>, 2> lorentz_weights(const OUNoiseParams& noise, const CoherencePair& pair) {
  std::array<std::array<double, 2>, 2> w{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      w[i][j] = pair.s[i] * pair.s[j] * 2.0 * noise.sigma[i] * noise.sigma[j] * noise.r(i, j) * noise.tau_c;
  return w;
}

}  // namespace

ModulationFunction::ModulationFunction(double total_time, std::vector<double> breakpoints)
    : total_time_(total_time), breakpoints_(std::move(breakpoints)) {
  require(std::isfinite(total_time_) && total_time_ > 0.0, "modulation window must be > 0");
  double prev = 0.0;
  for (double t : breakpoints_) {
    require(t > prev && t < total_time_, "modulation breakpoints must increase inside (0, T)");
    prev = t;
  }
  nodes_.reserve(breakpoints_.size() + 2);
  jumps_.reserve(breakpoints_.size() + 2);
  nodes_.push_back(0.0);
  jumps_.push_back(-1.0);
  double sign = 1.0;
  for (double t : breakpoints_) {
    nodes_.push_back(t);
    jumps_.push_back(2.0 * sign);
    sign = -sign;
  }
  nodes_.push_back(total_time_);
  jumps_.push_back(sign);
}

double ModulationFunction::value(double t) const {
  const auto flips = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t) - breakpoints_.begin();
  return flips % 2 == 0 ? 1.0 : -1.0;
}

double ModulationFunction::signed_area() const {
  double area = 0.0, start = 0.0, sign = 1.0;
  for (double t : breakpoints_) {
    area += sign * (t - start);
    start = t;
    sign = -sign;
  }
  return area + sign * (total_time_ - start);
}

ModulationFunction modulation(const PulseSequence& seq, int qubit) {
  return ModulationFunction(seq.total_time(), seq.times(qubit));
}

std::complex<double> window_transform(const ModulationFunction& y, double omega) {
  // Sum over intervals of (b - a) exp(i omega (a + b)/2) sinc(omega (b - a)/2).
  std::complex<double> acc = 0.0;
  double start = 0.0, sign = 1.0;
  auto add = [&](double end) {
    const double len = end - start;
    const double mid = 0.5 * (start + end);
    acc += sign * len * sinc(0.5 * omega * len) * std::polar(1.0, omega * mid);
  };
  for (double t : y.breakpoints()) {
    add(t);
    start = t;
    sign = -sign;
  }
  add(y.total_time());
  return acc;
}

FilterMatrix filter_matrix(const ModulationFunction& y1, const ModulationFunction& y2, double omega) {
  const auto a = window_transform(y1, omega);
  const auto b = window_transform(y2, omega);
  return {std::norm(a), std::norm(b), a * std::conj(b)};
}

CoherencePair CoherencePair::single(int qubit) {
  require(qubit == 0 || qubit == 1, "qubit index must be 0 or 1");
  CoherencePair p;
  p.s = qubit == 0 ? std::array<int, 2>{1, 0} : std::array<int, 2>{0, 1};
  return p;
}

CoherencePair CoherencePair::from_basis(int alpha, int beta) {
  require(alpha >= 0 && alpha < 4 && beta >= 0 && beta < 4, "basis indices must be in [0, 4)");
  CoherencePair p;
  for (int q = 0; q < 2; ++q) p.s[q] = (z_eigenvalue(alpha, q) - z_eigenvalue(beta, q)) / 2;
  return p;
}

void CoherencePair::validate() const {
  for (int v : s) require(v >= -2 && v <= 2, "coherence pair components must lie in [-2, 2]");
}

std::string_view to_string(ChiMethod m) {
  switch (m) {
    case ChiMethod::closed_form: return "closed-form";
    case ChiMethod::quadrature: return "quadrature";
    case ChiMethod::time_domain: return "time-domain";
    case ChiMethod::pmme: return "pmme";
    case ChiMethod::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

FrequencyDomainReport chi_frequency_domain_report(const OUNoiseParams& noise, const PulseSequence& seq,
                                                  const CoherencePair& pair, const FrequencyDomainOptions& opt) {
  noise.validate();
  pair.validate();
  const double total = seq.total_time();
  const double tau = noise.tau_c;
  const std::array<ModulationFunction, 2> y{modulation(seq, 0), modulation(seq, 1)};
  const bool shared = y[0] == y[1];
  const auto w = lorentz_weights(noise, pair);

  // Combined weight when both qubits share the modulation.
  const double w_shared = w[0][0] + w[1][1] + 2.0 * w[0][1];

  auto small_omega = [&](double omega) { return omega * total < 1.0; };
  auto transform = [&](const ModulationFunction& m, double omega) -> std::complex<double> {
    if (small_omega(omega)) return window_transform(m, omega);
    std::complex<double> acc = 0.0;
    const auto& nodes = m.nodes();
    const auto& jumps = m.jumps();
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += jumps[k] * std::polar(1.0, omega * nodes[k]);
    return acc / std::complex<double>(0.0, omega);
  };
  auto integrand = [&](double omega) {
    const double lorentz = 1.0 / (1.0 + omega * omega * tau * tau);
    double quad_form;
    if (shared) {
      quad_form = w_shared * std::norm(transform(y[0], omega));
    } else {
      const auto a = transform(y[0], omega);
      const auto b = transform(y[1], omega);
      quad_form = w[0][0] * std::norm(a) + w[1][1] * std::norm(b) + 2.0 * w[0][1] * (a * std::conj(b)).real();
    }
    return quad_form * lorentz / kPi;
  };

  FrequencyDomainReport rep;
  rep.omega_max = std::max(opt.omega_tau_factor / tau, opt.omega_t_factor / total);

  std::vector<double> cuts{0.0, rep.omega_max, 1.0 / tau};
  const auto n = static_cast<double>(seq.max_pulse_count());
  if (n > 0) cuts.push_back(n * kPi / total);
  const double step = 2.0 * kPi / total;
  for (double x = step; x < rep.omega_max; x += step) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double x) { return x > rep.omega_max; }), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto q = integrate_adaptive(integrand, cuts, opt.quadrature);
  rep.quadrature_error = q.abs_error;
  rep.evaluations = q.evaluations;

  // Remainder beyond omega_max: the coincident-node part of Y_i Y_j^* is
  // (1/omega^2) sum c_m c_n and integrates in closed form; the rest oscillates
  // as cos(omega Delta) and is bounded by min(int_W^inf g, 2 g(W) / |Delta|) with
  // g(W) = 1 / (W^2 (1 + W^2 tau^2)).
  const double wmax = rep.omega_max;
  const double g_w = 1.0 / (wmax * wmax * (1.0 + wmax * wmax * tau * tau));
  const double envelope = lorentzian_envelope_tail(wmax, tau);
  struct Term {
    double weight;
    int i, j;
  };
  std::vector<Term> terms;
  if (shared) {
    terms.push_back({w_shared, 0, 0});
  } else {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) terms.push_back({w[i][j], i, j});
  }
  for (const Term& term : terms) {
    if (term.weight == 0.0) continue;
    double diag = 0.0, bound = 0.0;
    const auto& ni = y[term.i].nodes();
    const auto& nj = y[term.j].nodes();
    for (std::size_t m = 0; m < ni.size(); ++m) {
      for (std::size_t k = 0; k < nj.size(); ++k) {
        const double c = y[term.i].jumps()[m] * y[term.j].jumps()[k];
        const double delta = std::abs(ni[m] - nj[k]);
        if (delta == 0.0) {
          diag += c;
        } else {
          bound += std::abs(c) * std::min(envelope, 2.0 * g_w / delta);
        }
      }
    }
    rep.tail_envelope += term.weight * diag * envelope / kPi;
    rep.tail_bound += std::abs(term.weight) * bound / kPi;
  }
  rep.chi = q.value + rep.tail_envelope;

  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double err = rep.quadrature_error + rep.tail_bound;
  const double allowed = opt.fail_rel_tol * std::abs(rep.chi) + 1e3 * eps * q.abs_integral;
  if (!(err <= allowed) || !std::isfinite(rep.chi)) {
    throw NumericalError("frequency-domain quadrature did not converge: error estimate " + std::to_string(err) +
                         " for chi = " + std::to_string(rep.chi));
  }
  return rep;
}

double chi_frequency_domain(const OUNoiseParams& noise, const PulseSequence& seq, const CoherencePair& pair,
                            const FrequencyDomainOptions& opt) {
  return chi_frequency_domain_report(noise, seq, pair, opt).chi;
}

double chi_time_domain(const OUNoiseParams& noise, const PulseSequence& seq, const CoherencePair& pair) {
  noise.validate();
  pair.validate();
  const std::array<ModulationFunction, 2> y{modulation(seq, 0), modulation(seq, 1)};
  double chi = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double coef = pair.s[i] * pair.s[j] * noise.sigma[i] * noise.sigma[j] * noise.r(i, j);
      if (coef == 0.0) continue;
      double acc = 0.0;
      const auto& ni = y[i].nodes();
      const auto& nj = y[j].nodes();
      for (std::size_t m = 0; m < ni.size(); ++m)
        for (std::size_t k = 0; k < nj.size(); ++k)
          acc += y[i].jumps()[m] * y[j].jumps()[k] * phi_kernel(ni[m] - nj[k], noise.tau_c);
      chi -= coef * acc;
    }
  }
  return chi;
}

FreeEvolutionChi chi_closed_form_free(const OUNoiseParams& noise, double t) {
  noise.validate();
  require(t >= 0.0, "time must be >= 0");
  FreeEvolutionChi out;
  const double shape = phi_kernel(t, noise.tau_c);  // tau_c (t - tau_c (1 - e^{-t/tau_c}))
  for (int i = 0; i < 2; ++i) {
    const double l = noise.lambda(i);
    out.single[i] = l * l * shape;
  }
  out.bell = out.single[0] + out.single[1] - 2.0 * noise.rho() * std::sqrt(out.single[0] * out.single[1]);
  return out;
}

double gamma_inst(const OUNoiseParams& noise, double t) {
  noise.validate();
  require(t >= 0.0, "time must be >= 0");
  const double l1 = noise.lambda(0), l2 = noise.lambda(1);
  const double rise = -std::expm1(-t / noise.tau_c);
  return (l1 * l1 + l2 * l2 - 2.0 * noise.rho() * l1 * l2) * noise.tau_c * rise;
}

double bell_markov_rate(const OUNoiseParams& noise) {
  const double g1 = noise.lambda(0) * noise.lambda(0) * noise.tau_c;
  const double g2 = noise.lambda(1) * noise.lambda(1) * noise.tau_c;
  return g1 + g2 - 2.0 * noise.rho() * std::sqrt(g1 * g2);
}

DephasingCurve chi_curve(const OUNoiseParams& noise, const SequenceFamily& family, std::span<const double> times,
                         const CoherencePair& pair, ChiMethod method) {
  DephasingCurve c;
  c.method = method;
  c.times.assign(times.begin(), times.end());
  c.chi.reserve(times.size());
  for (double t : times) {
    if (t == 0.0) {
      c.chi.push_back(0.0);
      continue;
    }
    switch (method) {
      case ChiMethod::time_domain: c.chi.push_back(chi_time_domain(noise, family(t), pair)); break;
      case ChiMethod::quadrature: c.chi.push_back(chi_frequency_domain(noise, family(t), pair)); break;
      default: throw InvalidArgument("chi_curve supports the time-domain and quadrature methods");
    }
  }
  return c;
}

}  // namespace ddforge
