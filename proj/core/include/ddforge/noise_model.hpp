#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

namespace ddforge {

// Correlated Ornstein-Uhlenbeck frequency noise acting on two qubits.
//
//   C_ij(tau)   = sigma_i sigma_j r_ij exp(-|tau| / tau_c)
//   S_ij(omega) = 2 sigma_i sigma_j r_ij tau_c / (1 + omega^2 tau_c^2)
//
// Amplitudes are angular frequencies in rad/us, times in us. The closed forms
// for the dephasing exponent use lambda_i with lambda_i^2 = 2 sigma_i^2.
struct OUNoiseParams {
  std::array<double, 2> sigma{0.0, 0.0};
  double tau_c = 1.0;
  Eigen::Matrix2d r = Eigen::Matrix2d::Identity();

  // Throws InvalidArgument unless sigma >= 0, tau_c > 0 and r is a symmetric
  // PSD correlation matrix with unit diagonal.
  static OUNoiseParams make(std::array<double, 2> sigma, double tau_c, const Eigen::Matrix2d& r);

  // Equal amplitudes, parameterised by lambda (rad/us) and the cross
  // correlation rho = r_12.
  static OUNoiseParams symmetric(double lambda, double tau_c, double rho);

  // Same, with the amplitude given as lambda/2pi in kHz.
  static OUNoiseParams from_lambda_khz(double lambda_over_2pi_khz, double tau_c, double rho);

  void validate() const;

  double lambda(int i) const;
  double rho() const { return r(0, 1); }

  // Copy with both amplitudes multiplied by `factor`.
  OUNoiseParams scaled(double factor) const;
};

// rad/us from a frequency given as f/2pi in kHz.
double khz_to_rad_per_us(double khz);

double correlation(const OUNoiseParams& p, int i, int j, double tau);
double spectral_density(const OUNoiseParams& p, int i, int j, double omega);

// Two correlated OU paths sampled on a uniform grid t_k = k dt, k = 0..n_steps.
struct NoisePaths {
  double dt = 0.0;
  std::array<std::vector<double>, 2> xi;
};

// Exact discretisation of the OU process with a stationary start. The
// innovations are correlated through the Cholesky factor of r. Deterministic
// for a fixed seed.
NoisePaths sample_paths(const OUNoiseParams& p, double dt, std::size_t n_steps, std::uint64_t seed);


}  // namespace ddforge
