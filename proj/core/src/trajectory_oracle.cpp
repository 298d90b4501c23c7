#include "ddforge/trajectory_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"
#include "ddforge/log.hpp"
#include "ddforge/parallel.hpp"

namespace ddforge {
namespace {

constexpr std::size_t kMaxChunks = 32;
constexpr int kPulseSubsteps = 10;

// Cumulative integral of the piecewise-linear interpolant of one path.
class PathIntegral {
 public:
  PathIntegral(double dt, const std::vector<double>& xi) : dt_(dt), xi_(xi), cum_(xi.size(), 0.0) {
    for (std::size_t k = 1; k < xi.size(); ++k) cum_[k] = cum_[k - 1] + 0.5 * dt * (xi[k - 1] + xi[k]);
  }

  double at(double t) const {
    std::size_t k;
    double u;
    locate(t, k, u);
    return cum_[k] + xi_[k] * u + (xi_[k + 1] - xi_[k]) * u * u / (2.0 * dt_);
  }

  double xi(double t) const {
    std::size_t k;
    double u;
    locate(t, k, u);
    return xi_[k] + (xi_[k + 1] - xi_[k]) * u / dt_;
  }

 private:
  void locate(double t, std::size_t& k, double& u) const {
    const double x = std::max(0.0, t / dt_);
    k = std::min(static_cast<std::size_t>(x), xi_.size() - 2);
    u = t - static_cast<double>(k) * dt_;
  }

  double dt_;
  const std::vector<double>& xi_;
  std::vector<double> cum_;
};

// exp(-i (a . sigma)) for a real 3-vector a.
Matrix2c su2(double ax, double ay, double az) {
  const double n = std::sqrt(ax * ax + ay * ay + az * az);
  const cplx i(0.0, 1.0);
  if (n == 0.0) return Matrix2c::Identity();
  const double c = std::cos(n), s = std::sin(n) / n;
  Matrix2c m;
  m(0, 0) = c - i * s * az;
  m(1, 1) = c + i * s * az;
  m(0, 1) = -i * s * cplx(ax, -ay);
  m(1, 0) = -i * s * cplx(ax, ay);
  return m;
}

Matrix2c z_phase(double phi) { return su2(0.0, 0.0, 0.5 * phi); }

Matrix2c axis_rotation(PulseAxis axis, double angle) {
  return axis == PulseAxis::X ? su2(0.5 * angle, 0.0, 0.0) : su2(0.0, 0.5 * angle, 0.0);
}

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c m;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return m;
}

struct Target {
  std::size_t seq = 0;  // index into the case's sequences
  double end = 0.0;
};

struct CaseSpec {
  std::vector<PulseSequence> sequences;
  std::vector<Target> targets;
  std::vector<double> times;
  PulseErrorModel errors;
};

void validate_windows(const PulseSequence& seq, double tau_p) {
  if (tau_p <= 0.0) return;
  for (int q = 0; q < 2; ++q) {
    const auto ev = seq.events(q);
    for (std::size_t k = 0; k < ev.size(); ++k) {
      require(ev[k].time - 0.5 * tau_p >= -1e-12 && ev[k].time + 0.5 * tau_p <= seq.total_time() + 1e-12,
              "pulse window leaves [0, T] at t=" + std::to_string(ev[k].time) + " us");
      if (k > 0) {
        require(ev[k].time - ev[k - 1].time > tau_p,
                "overlapping pulses: spacing " + std::to_string(ev[k].time - ev[k - 1].time) +
                    " us is not larger than tau_p");
      }
    }
  }
}

// Toggling-frame state of an ideal sequence: only z phases y-modulated by the pulses.
Matrix4c ideal_state(const Matrix4c& rho0, const PulseSequence& seq, double end,
                     const std::array<PathIntegral, 2>& path) {
  std::array<double, 2> phi{0.0, 0.0};
  for (int q = 0; q < 2; ++q) {
    double sign = 1.0, acc = 0.0;
    double prev = path[q].at(0.0);
    for (const auto& e : seq.events(q)) {
      if (e.time >= end) break;
      const double cur = path[q].at(e.time);
      acc += sign * (cur - prev);
      prev = cur;
      sign = -sign;
    }
    acc += sign * (path[q].at(end) - prev);
    phi[q] = acc;
  }
  Matrix4c out;
  for (int a = 0; a < 4; ++a) {
    const double pa = -0.5 * (z_eigenvalue(a, 0) * phi[0] + z_eigenvalue(a, 1) * phi[1]);
    for (int b = 0; b < 4; ++b) {
      const double pb = -0.5 * (z_eigenvalue(b, 0) * phi[0] + z_eigenvalue(b, 1) * phi[1]);
      out(a, b) = rho0(a, b) * std::polar(1.0, pa - pb);
    }
  }
  return out;
}

// Toggling-frame propagator of one qubit with finite, error-prone pulses.
Matrix2c pulsed_propagator(const PulseSequence& seq, int q, double end, const PathIntegral& path,
                           const PulseErrorModel& err, std::span<const double> z) {
  const double tau_p = err.tau_p_us();
  Matrix2c u = Matrix2c::Identity();
  Matrix2c control = Matrix2c::Identity();
  double t = 0.0;
  auto free_to = [&](double b) {
    if (b > t) u = z_phase(path.at(b) - path.at(t)) * u;
    t = std::max(t, b);
  };
  const auto ev = seq.events(q);
  for (std::size_t k = 0; k < ev.size(); ++k) {
    const auto& e = ev[k];
    const double eps = err.sigma_eps * (err.per_sequence_eps ? z[0] : z[k]);
    const double angle = (1.0 + eps) * e.nominal_angle;
    if (tau_p == 0.0) {
      if (e.time >= end) break;
      free_to(e.time);
      u = axis_rotation(e.axis, angle) * u;
      control = axis_rotation(e.axis, e.nominal_angle) * control;
      continue;
    }
    const double a = e.time - 0.5 * tau_p;
    if (a >= end) break;
    free_to(a);
    const double b = std::min(e.time + 0.5 * tau_p, end);
    const double rate = angle / tau_p;
    const double xi_frozen = err.frozen_noise ? path.xi(a) : 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / (tau_p / kPulseSubsteps) - 1e-9)));
    const double h = (b - a) / n;
    for (int s = 0; s < n; ++s) {
      const double lo = a + s * h, hi = lo + h;
      const double dphi = err.frozen_noise ? xi_frozen * h : path.at(hi) - path.at(lo);
      const double half_rot = 0.5 * rate * h;
      u = (e.axis == PulseAxis::X ? su2(half_rot, 0.0, 0.5 * dphi) : su2(0.0, half_rot, 0.5 * dphi)) * u;
    }
    control = axis_rotation(e.axis, e.nominal_angle * (b - a) / tau_p) * control;
    t = b;
  }
  free_to(end);
  return control.adjoint() * u;
}

double sample_std(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct Accumulator {
  std::vector<Matrix4c> sum;
  std::vector<std::vector<Matrix4c>> boot;
  std::vector<double> csum;
  std::vector<std::vector<double>> cboot;

  Accumulator(std::size_t n_targets, std::size_t n_boot, bool per_traj)
      : sum(n_targets, Matrix4c::Zero()), boot(n_boot, std::vector<Matrix4c>(n_targets, Matrix4c::Zero())) {
    if (per_traj) {
      csum.assign(n_targets, 0.0);
      cboot.assign(n_boot, std::vector<double>(n_targets, 0.0));
    }
  }

  void merge(const Accumulator& o) {
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += o.sum[i];
    for (std::size_t b = 0; b < boot.size(); ++b)
      for (std::size_t i = 0; i < sum.size(); ++i) boot[b][i] += o.boot[b][i];
    for (std::size_t i = 0; i < csum.size(); ++i) csum[i] += o.csum[i];
    for (std::size_t b = 0; b < cboot.size(); ++b)
      for (std::size_t i = 0; i < csum.size(); ++i) cboot[b][i] += o.cboot[b][i];
  }
};

std::vector<EnsembleResult> run_engine(const OUNoiseParams& params, const std::vector<CaseSpec>& cases,
                                       const DensityMatrix4& rho0, const EnsembleOptions& opt) {
  params.validate();
  require(opt.n_traj >= 100, "ensembles need n_traj >= 100");
  require(opt.bootstrap >= 2, "ensembles need at least 2 bootstrap replicates");
  require(opt.max_dt >= 0.0, "max_dt must be >= 0");

  double t_max = 0.0, tau_p_min = 0.0;
  std::size_t max_pulses = 1;
  bool warned = false;
  for (const auto& c : cases) {
    c.errors.validate();
    if (c.errors.sigma_eps > 0.2 && !warned) {
      log_warning("sigma_eps = " + std::to_string(c.errors.sigma_eps) + " exceeds 0.2; small-error model may not apply");
      warned = true;
    }
    const double tp = c.errors.tau_p_us();
    if (tp > 0.0) tau_p_min = tau_p_min == 0.0 ? tp : std::min(tau_p_min, tp);
    for (const auto& s : c.sequences) {
      validate_windows(s, tp);
      max_pulses = std::max(max_pulses, s.max_pulse_count());
    }
    for (const auto& tg : c.targets) {
      require(tg.end >= 0.0 && tg.end <= c.sequences[tg.seq].total_time() + 1e-12,
              "output time outside the sequence window");
      t_max = std::max(t_max, tg.end);
    }
  }
  double dt = params.tau_c / 200.0;
  if (t_max > 0.0) dt = std::min(dt, t_max / 2000.0);
  if (tau_p_min > 0.0) dt = std::min(dt, tau_p_min / 10.0);
  if (opt.max_dt > 0.0) dt = std::min(dt, opt.max_dt);
  const auto n_steps = static_cast<std::size_t>(std::max(1.0, std::ceil(t_max / dt)));
  if (t_max > 0.0) dt = t_max / static_cast<double>(n_steps);

  const bool per_traj = opt.concurrence == ConcurrenceMode::per_trajectory;
  const OUNoiseParams path_params = params.scaled(std::numbers::sqrt2);
  const Matrix4c& m0 = rho0.matrix();

  const std::size_t n_chunks = std::min(kMaxChunks, opt.n_traj);
  std::vector<std::vector<Accumulator>> acc(n_chunks);
  std::vector<std::vector<double>> wsum(n_chunks, std::vector<double>(opt.bootstrap, 0.0));
  for (auto& a : acc)
    for (const auto& c : cases) a.emplace_back(c.targets.size(), opt.bootstrap, per_traj);

  parallel_chunks(n_chunks, [&](std::size_t chunk) {
    const std::size_t begin = chunk * opt.n_traj / n_chunks;
    const std::size_t end = (chunk + 1) * opt.n_traj / n_chunks;
    std::vector<double> w(opt.bootstrap);
    std::array<std::vector<double>, 2> z;
    for (std::size_t traj = begin; traj < end; ++traj) {
      const std::uint64_t base = derive_seed(opt.seed, traj);
      const NoisePaths paths = sample_paths(path_params, dt, n_steps, derive_seed(base, 1));
      const std::array<PathIntegral, 2> integral{PathIntegral(dt, paths.xi[0]), PathIntegral(dt, paths.xi[1])};

      std::mt19937_64 eps_rng(derive_seed(base, 2));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& zq : z) {
        zq.resize(max_pulses);
        for (auto& v : zq) v = normal(eps_rng);
      }
      std::mt19937_64 boot_rng(derive_seed(base, 3));
      std::poisson_distribution<int> poisson(1.0);
      for (std::size_t b = 0; b < opt.bootstrap; ++b) {
        w[b] = poisson(boot_rng);
        wsum[chunk][b] += w[b];
      }

      for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const CaseSpec& c = cases[ci];
        Accumulator& a = acc[chunk][ci];
        for (std::size_t ti = 0; ti < c.targets.size(); ++ti) {
          const Target& tg = c.targets[ti];
          const PulseSequence& seq = c.sequences[tg.seq];
          Matrix4c rho;
          if (c.errors.ideal()) {
            rho = ideal_state(m0, seq, tg.end, integral);
          } else {
            const Matrix4c k = kron(pulsed_propagator(seq, 0, tg.end, integral[0], c.errors, z[0]),
                                    pulsed_propagator(seq, 1, tg.end, integral[1], c.errors, z[1]));
            rho = k * m0 * k.adjoint();
          }
          a.sum[ti] += rho;
          for (std::size_t b = 0; b < opt.bootstrap; ++b)
            if (w[b] != 0.0) a.boot[b][ti] += w[b] * rho;
          if (per_traj) {
            const double conc = concurrence_general(Matrix4c(0.5 * (rho + rho.adjoint())));
            a.csum[ti] += conc;
            for (std::size_t b = 0; b < opt.bootstrap; ++b) a.cboot[b][ti] += w[b] * conc;
          }
        }
      }
    }
  });

  std::vector<double> wtot(opt.bootstrap, 0.0);
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk)
    for (std::size_t b = 0; b < opt.bootstrap; ++b) wtot[b] += wsum[chunk][b];
  for (double v : wtot) {
    if (v <= 0.0) throw NumericalError("bootstrap replicate with zero total weight");
  }

  std::vector<EnsembleResult> out;
  const double n = static_cast<double>(opt.n_traj);
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    Accumulator total = acc[0][ci];
    for (std::size_t chunk = 1; chunk < n_chunks; ++chunk) total.merge(acc[chunk][ci]);
    EnsembleResult r;
    r.times = cases[ci].times;
    r.n_traj = opt.n_traj;
    r.dt = dt;
    r.mode = opt.concurrence;
    r.mean_states.resize(total.sum.size());
    for (std::size_t i = 0; i < total.sum.size(); ++i) r.mean_states[i] = total.sum[i] / n;
    r.replicate_states = std::move(total.boot);
    for (std::size_t b = 0; b < opt.bootstrap; ++b)
      for (auto& m : r.replicate_states[b]) m /= wtot[b];
    if (per_traj) {
      r.trajectory_concurrence = total.csum;
      for (double& v : r.trajectory_concurrence) v /= n;
      r.replicate_trajectory_concurrence = std::move(total.cboot);
      for (std::size_t b = 0; b < opt.bootstrap; ++b)
        for (double& v : r.replicate_trajectory_concurrence[b]) v /= wtot[b];
    }
    const Traces tr = extract_traces(r);
    r.concurrence = tr.concurrence;
    r.fidelity = tr.fidelity;
    r.concurrence_se = tr.concurrence_se;
    r.fidelity_se = tr.fidelity_se;
    out.push_back(std::move(r));
  }
  return out;
}

CaseSpec single_sequence_case(const PulseSequence& seq, const PulseErrorModel& err, std::span<const double> times) {
  CaseSpec c;
  c.sequences.push_back(seq);
  c.errors = err;
  for (double t : times) {
    require(t >= 0.0 && t <= seq.total_time() + 1e-12, "output times must lie in [0, T]");
    c.targets.push_back({0, t});
    c.times.push_back(t);
  }
  return c;
}

}  // namespace

void PulseErrorModel::validate() const {
  require(std::isfinite(tau_p_ns) && tau_p_ns >= 0.0, "tau_p must be >= 0");
  require(std::isfinite(sigma_eps) && sigma_eps >= 0.0, "sigma_eps must be >= 0");
}

Traces extract_traces(const EnsembleResult& r) {
  Traces t;
  const std::size_t n = r.mean_states.size();
  const Vector4c bell = states::psi_plus_vector();
  auto conc = [](const Matrix4c& m) { return concurrence_general(Matrix4c(0.5 * (m + m.adjoint()))); };
  const bool per_traj = r.mode == ConcurrenceMode::per_trajectory;
  std::vector<double> cb(r.replicate_states.size()), fb(r.replicate_states.size());
  for (std::size_t i = 0; i < n; ++i) {
    t.concurrence.push_back(per_traj ? r.trajectory_concurrence[i] : conc(r.mean_states[i]));
    t.fidelity.push_back(fidelity_with_pure(r.mean_states[i], bell));
    for (std::size_t b = 0; b < r.replicate_states.size(); ++b) {
      cb[b] = per_traj ? r.replicate_trajectory_concurrence[b][i] : conc(r.replicate_states[b][i]);
      fb[b] = fidelity_with_pure(r.replicate_states[b][i], bell);
    }
    t.concurrence_se.push_back(sample_std(cb));
    t.fidelity_se.push_back(sample_std(fb));
  }
  return t;
}

EnsembleResult run_ideal(const OUNoiseParams& params, const PulseSequence& seq, const DensityMatrix4& rho0,
                         std::span<const double> times, const EnsembleOptions& opt) {
  return run_engine(params, {single_sequence_case(seq, PulseErrorModel{}, times)}, rho0, opt).front();
}

EnsembleResult run_with_errors(const OUNoiseParams& params, const PulseSequence& seq, const PulseErrorModel& err,
                               const DensityMatrix4& rho0, std::span<const double> times,
                               const EnsembleOptions& opt) {
  return run_engine(params, {single_sequence_case(seq, err, times)}, rho0, opt).front();
}

std::vector<EnsembleResult> run_storage_sweep(const OUNoiseParams& params, std::span<const SweepCase> cases,
                                              const DensityMatrix4& rho0, std::span<const double> storage_times,
                                              const EnsembleOptions& opt) {
  require(!cases.empty(), "storage sweep needs at least one case");
  std::vector<CaseSpec> specs;
  for (const auto& sc : cases) {
    CaseSpec c;
    c.errors = sc.errors;
    for (double T : storage_times) {
      require(T > 0.0, "storage times must be > 0");
      c.sequences.push_back(sc.family(T));
      c.targets.push_back({c.sequences.size() - 1, T});
      c.times.push_back(T);
    }
    specs.push_back(std::move(c));
  }
  return run_engine(params, specs, rho0, opt);
}

LifetimeEstimate ensemble_tau_c(const EnsembleResult& r) {
  LifetimeEstimate est;
  est.value = first_crossing(r.times, r.concurrence, kConcurrenceThreshold);
  const bool per_traj = r.mode == ConcurrenceMode::per_trajectory;
  std::vector<double> crossed;
  std::vector<double> c(r.times.size());
  for (std::size_t b = 0; b < r.replicate_states.size(); ++b) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Matrix4c& m = r.replicate_states[b][i];
      c[i] = per_traj ? r.replicate_trajectory_concurrence[b][i]
                      : concurrence_general(Matrix4c(0.5 * (m + m.adjoint())));
    }
    const auto x = first_crossing(r.times, c, kConcurrenceThreshold);
    est.replicates.push_back(x ? *x : std::numeric_limits<double>::quiet_NaN());
    if (x) crossed.push_back(*x);
  }
  est.replicates_crossed = crossed.size();
  est.std_error = sample_std(crossed);
  return est;
}

}  // namespace ddforge
