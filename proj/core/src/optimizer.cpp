#include "ddforge/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"
#include "ddforge/parallel.hpp"

namespace ddforge {
namespace {

using Point = std::vector<double>;

struct Vertex {
  Point x;
  double f;
};

struct RunResult {
  Vertex best;
  int iterations = 0;
  bool converged = false;
};

RunResult nelder_mead(const std::function<double(const Point&)>& f, const Point& x0, double f_scale,
                      const NelderMeadConfig& cfg, int start, std::vector<TracePoint>& trace) {
  const std::size_t n = x0.size();
  std::vector<Vertex> s;
  s.push_back({x0, f(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    Point x = x0;
    x[i] += cfg.initial_edge;
    s.push_back({x, f(x)});
  }
  auto by_cost = [](const Vertex& a, const Vertex& b) { return a.f < b.f; };
  auto affine = [n](const Point& a, const Point& b, double t) {  // a + t (b - a)
    Point r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + t * (b[i] - a[i]);
    return r;
  };

  RunResult res;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    std::stable_sort(s.begin(), s.end(), by_cost);
    if (s.back().f - s.front().f < cfg.rel_tol * f_scale) {
      res.converged = true;
      break;
    }
    Point c(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (std::size_t i = 0; i < n; ++i) c[i] += s[v].x[i] / static_cast<double>(n);
    Vertex& worst = s.back();
    const double f_second = s[n - 1].f;

    const Point xr = affine(c, worst.x, -cfg.reflection);
    const double fr = f(xr);
    if (fr < s.front().f) {
      const Point xe = affine(c, xr, cfg.expansion);
      const double fe = f(xe);
      worst = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < f_second) {
      worst = {xr, fr};
    } else {
      bool accepted = false;
      if (fr < worst.f) {
        const Point xc = affine(c, xr, cfg.contraction);
        const double fc = f(xc);
        if (fc <= fr) {
          worst = {xc, fc};
          accepted = true;
        }
      } else {
        const Point xc = affine(c, worst.x, cfg.contraction);
        const double fc = f(xc);
        if (fc < worst.f) {
          worst = {xc, fc};
          accepted = true;
        }
      }
      if (!accepted) {
        for (std::size_t v = 1; v <= n; ++v) {
          s[v].x = affine(s.front().x, s[v].x, cfg.shrink);
          s[v].f = f(s[v].x);
        }
      }
    }
    res.iterations = it + 1;
    const auto best = std::min_element(s.begin(), s.end(), by_cost);
    trace.push_back({start, it + 1, best->f});
  }
  res.best = *std::min_element(s.begin(), s.end(), by_cost);
  return res;
}

}  // namespace

void OptimizationProblem::validate() const {
  require(n_pulses >= 0, "pulse count must be >= 0");
  require(std::isfinite(t_star) && t_star > 0.0, "T* must be > 0");
  require(min_gap >= 0.0 && (n_pulses + 1) * min_gap < t_star, "min_gap leaves no room for the pulses");
  noise.validate();
  pair.validate();
}

bool OptimizationProblem::feasible(std::span<const double> times) const {
  if (static_cast<int>(times.size()) != n_pulses) return false;
  double prev = 0.0;
  for (double t : times) {
    if (!(t - prev > 0.0) || t - prev < min_gap) return false;
    prev = t;
  }
  return t_star - prev > 0.0 && t_star - prev >= min_gap;
}

PulseSequence OptimizationProblem::sequence(std::span<const double> times) const {
  return custom_symmetric(std::vector<double>(times.begin(), times.end()), t_star, axis_pattern);
}

double cost(const OptimizationProblem& problem, std::span<const double> times) {
  problem.validate();
  require(problem.feasible(times), "infeasible pulse times");
  const PulseSequence seq = problem.sequence(times);
  return problem.method == CostMethod::frequency_domain ? chi_frequency_domain(problem.noise, seq, problem.pair)
                                                         : chi_time_domain(problem.noise, seq, problem.pair);
}

std::vector<double> equally_spaced_times(int n, double t_star) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) t[k] = (k + 0.5) * t_star / n;
  return t;
}

std::vector<double> times_from_parameters(std::span<const double> u, double t_star, double min_gap) {
  const std::size_t n = u.size();
  const double umax = std::max(0.0, u.empty() ? 0.0 : *std::max_element(u.begin(), u.end()));
  std::vector<double> e(n + 1);
  e[0] = std::exp(-umax);
  for (std::size_t j = 0; j < n; ++j) e[j + 1] = std::exp(u[j] - umax);
  const double z = std::accumulate(e.begin(), e.end(), 0.0);
  const double free = t_star - static_cast<double>(n + 1) * min_gap;
  std::vector<double> t(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    acc += min_gap + free * e[k] / z;
    t[k] = acc;
  }
  return t;
}

std::vector<double> parameters_from_times(std::span<const double> times, double t_star, double min_gap) {
  const std::size_t n = times.size();
  std::vector<double> gaps(n + 1);
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    gaps[k] = times[k] - prev;
    prev = times[k];
  }
  gaps[n] = t_star - prev;
  for (double g : gaps) require(g > min_gap, "times violate the gap constraint");
  std::vector<double> u(n);
  for (std::size_t j = 0; j < n; ++j) u[j] = std::log((gaps[j + 1] - min_gap) / (gaps[0] - min_gap));
  return u;
}

OptimizationReport optimize(const OptimizationProblem& problem, const NelderMeadConfig& config, std::uint64_t seed) {
  problem.validate();
  require(problem.n_pulses >= 1, "optimization needs at least one pulse");
  require(config.max_iterations >= 1 && config.restarts >= 0, "invalid Nelder-Mead settings");

  const std::vector<double> t0 = equally_spaced_times(problem.n_pulses, problem.t_star);
  require(problem.feasible(t0), "equally spaced guess violates min_gap");
  const Point u0 = parameters_from_times(t0, problem.t_star, problem.min_gap);
  auto objective = [&](const Point& u) {
    return cost(problem, times_from_parameters(u, problem.t_star, problem.min_gap));
  };

  OptimizationReport rep;
  rep.initial_cost = objective(u0);
  const double scale = rep.initial_cost > 0.0 ? rep.initial_cost : 1.0;

  // Starts are independent; results are combined in start order.
  const int n_starts = 1 + config.restarts;
  std::vector<RunResult> runs(static_cast<std::size_t>(n_starts));
  std::vector<std::vector<TracePoint>> traces(runs.size());
  parallel_chunks(runs.size(), [&](std::size_t s) {
    Point x = u0;
    if (s > 0) {
      std::mt19937_64 rng(derive_seed(seed, s));
      std::normal_distribution<double> normal(0.0, config.restart_spread);
      for (double& v : x) v += normal(rng);
    }
    runs[s] = nelder_mead(objective, x, scale, config, static_cast<int>(s), traces[s]);
  });

  RunResult best = runs.front();
  for (std::size_t s = 0; s < runs.size(); ++s) {
    rep.trace.insert(rep.trace.end(), traces[s].begin(), traces[s].end());
    rep.iterations += runs[s].iterations;
    if (runs[s].best.f < best.best.f) best = runs[s];
  }
  // Monotone best-so-far: never report worse than the initial guess.
  if (best.best.f > rep.initial_cost) best.best = {u0, rep.initial_cost};
  rep.converged = best.converged;
  rep.times = times_from_parameters(best.best.x, problem.t_star, problem.min_gap);
  rep.cost = best.best.f;

  const double t1 = rep.times.front(), tail = problem.t_star - rep.times.back();
  if (t1 > tail) {
    std::vector<double> mirrored(rep.times.rbegin(), rep.times.rend());
    for (double& t : mirrored) t = problem.t_star - t;
    rep.times = mirrored;
  }
  return rep;
}

std::string protocol_name(Protocol p, int n_pulses) {
  const std::string n = std::to_string(n_pulses);
  switch (p) {
    case Protocol::no_dd: return "no-DD";
    case Protocol::cpmg: return "CPMG-" + n;
    case Protocol::udd: return "UDD-" + n;
    case Protocol::xy8: return "XY-" + n;
    case Protocol::tls_opt: return "TLS-opt";
  }
  return "?";
}

std::string_view protocol_key(Protocol p) {
  switch (p) {
    case Protocol::no_dd: return "no-dd";
    case Protocol::cpmg: return "cpmg";
    case Protocol::udd: return "udd";
    case Protocol::xy8: return "xy8";
    case Protocol::tls_opt: return "tls-opt";
  }
  return "?";
}

Protocol parse_protocol(std::string_view key) {
  for (Protocol p : kAllProtocols)
    if (protocol_key(p) == key) return p;
  throw InvalidArgument("unknown protocol '" + std::string(key) + "' (expected no-dd, cpmg, udd, xy8, tls-opt)");
}

SequenceFamily protocol_family(Protocol p, int n_pulses, std::span<const double> tls_normalized_times) {
  require(n_pulses >= 1 || p == Protocol::no_dd, "protocol needs at least one pulse");
  switch (p) {
    case Protocol::no_dd: return free_family();
    case Protocol::cpmg: return cpmg_family(n_pulses);
    case Protocol::udd: return udd_family(n_pulses);
    case Protocol::xy8: return scaled_family(equally_spaced_times(n_pulses, 1.0), xy8_axis_pattern());
    case Protocol::tls_opt:
      require(!tls_normalized_times.empty(), "TLS-opt needs optimised pulse times");
      return scaled_family(std::vector<double>(tls_normalized_times.begin(), tls_normalized_times.end()),
                           xy8_axis_pattern());
  }
  throw InvalidArgument("unknown protocol");
}

std::vector<ProtocolSummary> compare_protocols(double t_star, int n_pulses, const OUNoiseParams& noise,
                                               const CoherencePair& pair,
                                               std::optional<std::vector<double>> tls_normalized_times) {
  require(t_star > 0.0 && n_pulses >= 1, "comparison needs T* > 0 and N >= 1");
  noise.validate();
  if (!tls_normalized_times) {
    OptimizationProblem p;
    p.n_pulses = n_pulses;
    p.t_star = t_star;
    p.noise = noise;
    p.pair = pair;
    p.method = CostMethod::time_domain;
    std::vector<double> t = optimize(p).times;
    for (double& x : t) x /= t_star;
    tls_normalized_times = std::move(t);
  }
  std::vector<ProtocolSummary> out;
  for (Protocol p : kAllProtocols) {
    const SequenceFamily family = protocol_family(p, n_pulses, *tls_normalized_times);
    ProtocolSummary s;
    s.name = protocol_name(p, n_pulses);
    s.chi = chi_time_domain(noise, family(t_star), pair);
    const auto m = bell_concurrence_fidelity(std::max(0.0, s.chi));
    s.concurrence = m.concurrence;
    s.fidelity = m.fidelity;
    const auto life = protocol_lifetimes(noise, family, pair);
    s.tau_c = life.tau_c;
    s.t_0999 = life.t_0999;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ddforge
