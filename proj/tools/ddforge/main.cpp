#include <cstdint>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ddforge/commands.hpp"
#include "ddforge/error.hpp"

namespace {

void fail_line(const char* kind, std::string msg) {
  for (char& c : msg)
    if (c == '\n' || c == '\r') c = ' ';
  std::cerr << "ddforge: error[" << kind << "]: " << msg << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  using namespace ddforge::app;

  CLI::App app{"ddforge: dynamical decoupling of two qubits under correlated OU dephasing"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_dir, protocol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_traj;
  std::optional<int> n_pulses;
  std::optional<double> t_star;
  app.add_option("--config", config_path, "JSON config file (defaults are used for missing keys)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "Monte-Carlo / multi-start seed");
  app.add_option("--n-traj", n_traj, "Monte-Carlo trajectory count");
  app.add_option("--protocol", protocol, "all, no-dd, cpmg, udd, xy8 or tls-opt");
  app.add_option("--n-pulses", n_pulses, "pulse count N");
  app.add_option("--t-star-us", t_star, "storage time T* in us");

  const std::map<std::string, std::pair<std::string, std::function<int(const ExperimentConfig&, std::ostream&)>>>
      commands{
          {"swap", {"exchange oscillations of two detuned qubits (fig1b.csv)", cmd_swap}},
          {"decay", {"free-evolution Bell decay versus rho (fig2.csv)", cmd_decay}},
          {"filters", {"filter functions and spectral overlaps (fig3.csv)", cmd_filters}},
          {"optimize", {"TLS-opt sequence and protocol comparison", cmd_optimize}},
          {"robustness", {"Monte-Carlo tau_C versus pulse-angle error (fig4c.csv)", cmd_robustness}},
          {"pmme", {"post-Markovian master equation, analytic and Volterra (pmme.csv)", cmd_pmme}},
      };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    fail_line("config", e.what());
    return kExitConfig;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (seed) cfg.mc.seed = *seed;
    if (n_traj) cfg.mc.n_traj = *n_traj;
    if (!protocol.empty()) cfg.dd.protocol = protocol;
    if (n_pulses) cfg.dd.n_pulses = *n_pulses;
    if (t_star) cfg.dd.t_star_us = *t_star;
    cfg.validate();
    const std::string name = app.get_subcommands().front()->get_name();
    return commands.at(name).second(cfg, std::cout);
  } catch (const ConfigError& e) {
    fail_line("config", e.what());
    return kExitConfig;
  } catch (const ddforge::InvalidArgument& e) {
    fail_line("config", e.what());
    return kExitConfig;
  } catch (const ddforge::NumericalError& e) {
    fail_line("numerical", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    fail_line("numerical", e.what());
    return kExitNumerical;
  }
}
