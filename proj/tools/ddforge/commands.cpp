#include "ddforge/commands.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ddforge/dd_sequences.hpp"
#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"
#include "ddforge/filter_engine.hpp"
#include "ddforge/lindblad_swap.hpp"
#include "ddforge/optimizer.hpp"
#include "ddforge/pmme_solver.hpp"
#include "ddforge/trajectory_oracle.hpp"

namespace ddforge::app {
namespace {

namespace fs = std::filesystem;

std::string num(double x) { return fmt::format("{:.10g}", x); }

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
    if (!out_) throw ConfigError("cannot write " + path.string());
    row(header);
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

fs::path prepare_output(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  return cfg.output_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) v[k] = a + (b - a) * k / (n - 1);
  return v;
}

std::vector<Protocol> selected_protocols(const ExperimentConfig& cfg) {
  if (cfg.dd.protocol == "all") return {std::begin(kAllProtocols), std::end(kAllProtocols)};
  return {parse_protocol(cfg.dd.protocol)};
}

OptimizationProblem tls_problem(const ExperimentConfig& cfg) {
  OptimizationProblem p;
  p.n_pulses = cfg.dd.n_pulses;
  p.t_star = cfg.dd.t_star_us;
  p.noise = cfg.noise.params();
  p.min_gap = cfg.optimize.min_gap_us;
  p.axis_pattern = xy8_axis_pattern();
  return p;
}

NelderMeadConfig nm_config(const ExperimentConfig& cfg) {
  NelderMeadConfig nm;
  nm.max_iterations = cfg.optimize.max_iterations;
  nm.restarts = cfg.optimize.restarts;
  return nm;
}

std::vector<double> normalized(std::vector<double> t, double t_star) {
  for (double& x : t) x /= t_star;
  return t;
}

// Normalised TLS-opt times, optimised with the exact time-domain cost; the
// optimize command uses the frequency-domain cost.
std::vector<double> tls_times(const ExperimentConfig& cfg) {
  OptimizationProblem p = tls_problem(cfg);
  p.method = CostMethod::time_domain;
  return normalized(optimize(p, nm_config(cfg), cfg.mc.seed).times, p.t_star);
}

DensityMatrix4 swap_initial_state(const std::string& key) {
  if (key == "psi_plus") return states::psi_plus();
  return states::basis(basis_index(key[0] - '0', key[1] - '0'));
}

}  // namespace

int cmd_swap(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const SwapModel model = cfg.swap.model();
  const int n = static_cast<int>(std::llround(cfg.swap.t_max_ns / cfg.swap.dt_out_ns));
  const std::vector<double> grid = linspace(0.0, n * cfg.swap.dt_out_ns, n + 1);
  const SwapTrajectory tr = evolve_swap(model, swap_initial_state(cfg.swap.initial_state), grid);

  Csv csv(out / "fig1b.csv", {"t_ns", "concurrence", "fidelity_bell", "p01", "purity"});
  for (std::size_t k = 0; k < tr.times.size(); ++k)
    csv.row({num(tr.times[k]), num(tr.concurrence[k]), num(tr.fidelity[k]), num(tr.p01[k]), num(tr.purity[k])});
  log << fmt::format("swap: Omega = {:.6g} rad/ns, RK4 dt = {:.3g} ns, max trace drift = {:.3g}\n",
                     model.splitting(), tr.dt_used, tr.max_trace_drift);
  return kExitOk;
}

int cmd_decay(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const std::vector<double> times = linspace(0.0, cfg.decay.t_max_us, cfg.decay.n_times);
  Csv csv(out / "fig2.csv", {"rho", "t_us", "chi_closed_form", "chi_quadrature", "concurrence", "fidelity_bell",
                             "gamma_inst_per_us", "concurrence_markov"});
  const CoherencePair bell = CoherencePair::bell();
  for (double rho : cfg.decay.rho_list) {
    const OUNoiseParams noise = OUNoiseParams::from_lambda_khz(cfg.noise.lambda_over_2pi_khz, cfg.noise.tau_c_us, rho);
    const double markov = bell_markov_rate(noise);
    for (double t : times) {
      const double chi = t > 0.0 ? chi_closed_form_free(noise, t).bell : 0.0;
      const double chi_q = t > 0.0 ? chi_frequency_domain(noise, free_evolution(t), bell) : 0.0;
      const auto m = bell_concurrence_fidelity(chi);
      csv.row({num(rho), num(t), num(chi), num(chi_q), num(m.concurrence), num(m.fidelity),
               num(gamma_inst(noise, t)), num(std::exp(-markov * t))});
    }
  }
  log << fmt::format("decay: {} rho values x {} times\n", cfg.decay.rho_list.size(), times.size());
  return kExitOk;
}

int cmd_filters(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const OUNoiseParams noise = cfg.noise.params();
  const CoherencePair bell = CoherencePair::bell();
  const double T = cfg.dd.t_star_us;
  const int n = cfg.dd.n_pulses;
  const auto protocols = selected_protocols(cfg);
  std::vector<double> tls;
  for (Protocol p : protocols)
    if (p == Protocol::tls_opt) tls = tls_times(cfg);

  const std::vector<double> omegas = linspace(0.0, cfg.filters.omega_max_per_us, cfg.filters.n_omega);
  Csv csv(out / "fig3.csv", {"protocol", "omega_rad_per_us", "spectrum_bell_us", "filter_q1_us2", "overlap"});
  Csv summary(out / "fig3_summary.csv", {"protocol", "chi_frequency_domain", "chi_time_domain"});
  for (Protocol p : protocols) {
    const PulseSequence seq = protocol_family(p, n, tls)(T);
    const std::string name = protocol_name(p, n);
    const ModulationFunction y1 = modulation(seq, 0), y2 = modulation(seq, 1);
    for (double w : omegas) {
      const FilterMatrix f = filter_matrix(y1, y2, w);
      // s^T (S o F) s; for identical modulation this is (s^T S s) |Y|^2.
      double s_bell = 0.0, overlap = 0.0;
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const double fij = i != j ? f.f12.real() : (i == 0 ? f.f11 : f.f22);
          const double sij = bell.s[i] * bell.s[j] * spectral_density(noise, i, j, w);
          s_bell += sij;
          overlap += sij * fij / std::numbers::pi;
        }
      }
      csv.row({name, num(w), num(s_bell), num(f.f11), num(overlap)});
    }
    summary.row({name, num(chi_frequency_domain(noise, seq, bell)), num(chi_time_domain(noise, seq, bell))});
  }
  log << fmt::format("filters: {} protocols at T* = {} us\n", protocols.size(), T);
  return kExitOk;
}

int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const OptimizationProblem problem = tls_problem(cfg);
  const OptimizationReport rep = optimize(problem, nm_config(cfg), cfg.mc.seed);

  write_text(out / "tls_opt_sequence.json", to_json(problem.sequence(rep.times)) + "\n");
  {
    Csv trace(out / "optimize_trace.csv", {"start", "iteration", "cost_J"});
    for (const auto& tp : rep.trace) trace.row({std::to_string(tp.start), std::to_string(tp.iteration), num(tp.cost)});
  }
  {
    Csv times(out / "tls_opt_times.csv", {"k", "t_us", "t_over_t_star"});
    for (std::size_t k = 0; k < rep.times.size(); ++k)
      times.row({std::to_string(k + 1), num(rep.times[k]), num(rep.times[k] / problem.t_star)});
  }
  const auto table = compare_protocols(problem.t_star, problem.n_pulses, problem.noise, problem.pair,
                                       normalized(rep.times, problem.t_star));
  {
    Csv csv(out / "protocols.csv",
            {"protocol", "chi_at_t_star", "concurrence_at_t_star", "fidelity_at_t_star", "tau_c_us", "t_0999_us"});
    for (const auto& s : table)
      csv.row({s.name, num(s.chi), num(s.concurrence), num(s.fidelity), opt_num(s.tau_c), opt_num(s.t_0999)});
  }
  log << fmt::format("optimize: J = {:.10g} (initial {:.10g}), {} iterations, converged = {}\n", rep.cost,
                     rep.initial_cost, rep.iterations, rep.converged);
  if (!rep.converged) {
    throw NumericalError(fmt::format("Nelder-Mead did not converge in {} iterations; best-effort output written",
                                     rep.iterations));
  }
  return kExitOk;
}

int cmd_robustness(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const OUNoiseParams noise = cfg.noise.params();
  const int n = cfg.dd.n_pulses;
  const auto protocols = selected_protocols(cfg);
  std::vector<double> tls;
  for (Protocol p : protocols)
    if (p == Protocol::tls_opt) tls = tls_times(cfg);

  std::vector<double> storage(static_cast<std::size_t>(cfg.mc.n_times));
  for (int k = 0; k < cfg.mc.n_times; ++k) storage[k] = cfg.mc.t_max_us * (k + 1) / cfg.mc.n_times;

  std::vector<SweepCase> cases;
  std::vector<std::pair<std::string, double>> labels;
  for (Protocol p : protocols) {
    for (double s : cfg.mc.sigma_eps) {
      cases.push_back({protocol_family(p, n, tls), cfg.mc.errors(s)});
      labels.emplace_back(protocol_name(p, n), s);
    }
  }
  const auto results = run_storage_sweep(noise, cases, states::psi_plus(), storage, cfg.mc.options());

  Csv csv(out / "fig4c.csv", {"sigma_eps", "protocol", "tau_C_us", "stderr_us", "replicates_crossed"});
  Csv curves(out / "fig4c_curves.csv",
             {"sigma_eps", "protocol", "T_us", "concurrence", "concurrence_se", "fidelity_bell", "fidelity_se"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const LifetimeEstimate est = ensemble_tau_c(r);
    csv.row({num(labels[i].second), labels[i].first, opt_num(est.value), num(est.std_error),
             std::to_string(est.replicates_crossed)});
    for (std::size_t k = 0; k < r.times.size(); ++k)
      curves.row({num(labels[i].second), labels[i].first, num(r.times[k]), num(r.concurrence[k]),
                  num(r.concurrence_se[k]), num(r.fidelity[k]), num(r.fidelity_se[k])});
  }
  log << fmt::format("robustness: {} cases, {} trajectories, grid dt = {:.3g} us\n", cases.size(), cfg.mc.n_traj,
                     results.front().dt);
  return kExitOk;
}

int cmd_pmme(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out = prepare_output(cfg);
  const OUNoiseParams noise = cfg.noise.params();
  const double lambda = noise.lambda(0);
  const double gamma0 = cfg.pmme.gamma0_per_us > 0.0 ? cfg.pmme.gamma0_per_us : lambda * lambda * noise.tau_c;
  const DephasingLindbladian L = DephasingLindbladian::make(gamma0, noise.rho());
  const MemoryKernel k{noise.tau_c};
  const int a = basis_index(0, 1), b = basis_index(1, 0);

  const PmmeTrajectory vol = pmme_evolve_volterra(L, k, states::psi_plus(), cfg.pmme.dt_us, cfg.pmme.t_max_us);
  const PmmeTrajectory ana = pmme_evolve_analytic(L, k, states::psi_plus(), vol.times);
  const PmmeChi chi_v = chi_pm(vol, a, b);
  const PmmeChi chi_a = chi_pm(ana, a, b);

  Csv csv(out / "pmme.csv", {"t_us", "re_coherence_analytic", "im_coherence_analytic", "chi_pm_analytic",
                             "gamma_inst_analytic_per_us", "re_coherence_volterra", "im_coherence_volterra",
                             "chi_pm_volterra", "gamma_inst_volterra_per_us", "chi_filter", "residual"});
  double max_element_diff = 0.0, max_residual = 0.0;
  const std::size_t rows = std::min(chi_v.curve.times.size(), chi_a.curve.times.size());
  for (std::size_t i = 0; i < vol.states.size(); ++i)
    max_element_diff = std::max(max_element_diff, (vol.states[i] - ana.states[i]).cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = vol.times[i];
    const double chi_f = t > 0.0 ? chi_closed_form_free(noise, t).bell : 0.0;
    const double residual = chi_a.curve.chi[i] - chi_f;
    max_residual = std::max(max_residual, std::abs(residual));
    csv.row({num(t), num(ana.states[i](a, b).real()), num(ana.states[i](a, b).imag()), num(chi_a.curve.chi[i]),
             num(chi_a.gamma_inst[i]), num(vol.states[i](a, b).real()), num(vol.states[i](a, b).imag()),
             num(chi_v.curve.chi[i]), num(chi_v.gamma_inst[i]), num(chi_f), num(residual)});
  }

  const double mu = coherence_rate(L, CoherencePair::bell());
  write_text(out / "pmme_report.json",
             fmt::format("{{\n  \"gamma0_per_us\": {},\n  \"bell_rate_per_us\": {},\n  \"filter_bell_rate_per_us\": {},\n"
                         "  \"max_abs_element_diff\": {},\n  \"max_abs_chi_residual\": {},\n"
                         "  \"volterra_trace_drift\": {},\n  \"min_eigenvalue\": {},\n"
                         "  \"positivity_violations\": {}\n}}\n",
                         num(gamma0), num(mu), num(bell_markov_rate(noise)), num(max_element_diff),
                         num(max_residual), num(vol.max_trace_drift),
                         num(std::min(vol.min_eigenvalue, ana.min_eigenvalue)),
                         vol.positivity_violations + ana.positivity_violations));
  log << fmt::format("pmme: max |analytic - volterra| = {:.3g}, max |chi_pm - chi_filter| = {:.3g}\n",
                     max_element_diff, max_residual);
  return kExitOk;
}

}  // namespace ddforge::app
