#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddforge/lindblad_swap.hpp"
#include "ddforge/noise_model.hpp"
#include "ddforge/trajectory_oracle.hpp"

namespace ddforge::app {

// Bad or inconsistent configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NoiseConfig {
  double lambda_over_2pi_khz = 80.0;
  double tau_c_us = 0.5;
  double rho = 0.8;

  OUNoiseParams params() const;
};

struct SwapConfig {
  double f1_ghz = 0.60;
  double f2_ghz = 0.62;
  double J_ghz = 0.02;
  double gamma_per_ns = 0.001;
  double t_max_ns = 200.0;
  double dt_out_ns = 0.1;
  std::string collapse = "sqrt_gamma";  // or sqrt_half_gamma
  bool rotating_frame = false;
  bool angular_coupling = true;
  std::string initial_state = "10";  // 00, 01, 10, 11 or psi_plus

  SwapModel model() const;
};

struct DdConfig {
  std::string protocol = "all";  // all, no-dd, cpmg, udd, xy8, tls-opt
  int n_pulses = 8;
  double t_star_us = 1.0;
};

struct OptimizeConfig {
  int restarts = 0;
  int max_iterations = 2000;
  double min_gap_us = 0.0;
};

struct DecayConfig {
  std::vector<double> rho_list{0.0, 0.4, 0.8, 1.0};
  double t_max_us = 5.0;
  int n_times = 201;
};

struct FiltersConfig {
  double omega_max_per_us = 60.0;
  int n_omega = 601;
};

struct McConfig {
  std::size_t n_traj = 2000;
  std::uint64_t seed = 20240611;
  double tau_p_ns = 10.0;
  std::vector<double> sigma_eps{0.0, 0.01, 0.02, 0.05};
  bool per_sequence_eps = false;
  bool frozen_noise = false;
  std::string concurrence = "mean_state";  // or per_trajectory
  double t_max_us = 40.0;
  int n_times = 40;

  PulseErrorModel errors(double sigma) const;
  EnsembleOptions options() const;
};

struct PmmeConfig {
  double t_max_us = 5.0;
  double dt_us = 0.01;
  double gamma0_per_us = 0.0;  // 0 selects lambda^2 tau_c
};

struct ExperimentConfig {
  NoiseConfig noise;
  SwapConfig swap;
  DdConfig dd;
  OptimizeConfig optimize;
  DecayConfig decay;
  FiltersConfig filters;
  McConfig mc;
  PmmeConfig pmme;
  std::filesystem::path output_dir = "out";

  // Throws ConfigError naming the offending key.
  void validate() const;
};

// Flat JSON sections ("noise", "swap", "dd", "optimize", "decay", "filters",
// "mc", "pmme", "output_dir"); missing keys keep the defaults, unknown keys
// are rejected.
ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace ddforge::app
