#include "ddforge/noise_model.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "ddforge/error.hpp"

namespace ddforge {

OUNoiseParams OUNoiseParams::make(std::array<double, 2> sigma, double tau_c, const Eigen::Matrix2d& r) {
  OUNoiseParams p;
  p.sigma = sigma;
  p.tau_c = tau_c;
  p.r = r;
  p.validate();
  return p;
}

OUNoiseParams OUNoiseParams::symmetric(double lambda, double tau_c, double rho) {
  require(lambda >= 0.0 && std::isfinite(lambda), "noise amplitude lambda must be >= 0");
  const double s = lambda / std::sqrt(2.0);
  Eigen::Matrix2d r;
  r << 1.0, rho, rho, 1.0;
  return make({s, s}, tau_c, r);
}

OUNoiseParams OUNoiseParams::from_lambda_khz(double lambda_over_2pi_khz, double tau_c, double rho) {
  return symmetric(khz_to_rad_per_us(lambda_over_2pi_khz), tau_c, rho);
}

void OUNoiseParams::validate() const {
  for (double s : sigma) require(std::isfinite(s) && s >= 0.0, "noise amplitude sigma must be >= 0");
  require(std::isfinite(tau_c) && tau_c > 0.0, "correlation time tau_c must be > 0");
  require(r.allFinite(), "correlation matrix must be finite");
  require(r(0, 0) == 1.0 && r(1, 1) == 1.0, "correlation matrix must have unit diagonal");
  require(r(0, 1) == r(1, 0), "correlation matrix must be symmetric");
  require(std::abs(r(0, 1)) <= 1.0, "correlation coefficient must satisfy |r_12| <= 1");
  // For a 2x2 unit-diagonal matrix |r_12| <= 1 is equivalent to PSD.
}

double OUNoiseParams::lambda(int i) const { return std::sqrt(2.0) * sigma.at(i); }

OUNoiseParams OUNoiseParams::scaled(double factor) const {
  require(factor >= 0.0, "amplitude scale factor must be >= 0");
  OUNoiseParams p = *this;
  p.sigma = {sigma[0] * factor, sigma[1] * factor};
  return p;
}

double khz_to_rad_per_us(double khz) { return 2.0 * std::numbers::pi * khz * 1e-3; }

double correlation(const OUNoiseParams& p, int i, int j, double tau) {
  return p.sigma.at(i) * p.sigma.at(j) * p.r(i, j) * std::exp(-std::abs(tau) / p.tau_c);
}

double spectral_density(const OUNoiseParams& p, int i, int j, double omega) {
  const double x = omega * p.tau_c;
  return 2.0 * p.sigma.at(i) * p.sigma.at(j) * p.r(i, j) * p.tau_c / (1.0 + x * x);
}

NoisePaths sample_paths(const OUNoiseParams& p, double dt, std::size_t n_steps, std::uint64_t seed) {
  p.validate();
  require(dt > 0.0 && std::isfinite(dt), "sample_paths: dt must be > 0");
  require(n_steps >= 1, "sample_paths: n_steps must be >= 1");

  // Cholesky factor of r; |r_12| <= 1 guarantees a real second diagonal.
  const double rho = p.r(0, 1);
  const double l22 = std::sqrt(std::max(0.0, 1.0 - rho * rho));
  const double a = std::exp(-dt / p.tau_c);
  const double b = std::sqrt(-std::expm1(-2.0 * dt / p.tau_c));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto correlated_pair = [&] {
    const double z1 = normal(rng);
    const double z2 = normal(rng);
    return std::array<double, 2>{z1, rho * z1 + l22 * z2};
  };

  NoisePaths out;
  out.dt = dt;
  for (auto& v : out.xi) v.resize(n_steps + 1);
  auto z = correlated_pair();
  for (int i = 0; i < 2; ++i) out.xi[i][0] = p.sigma[i] * z[i];
  for (std::size_t k = 1; k <= n_steps; ++k) {
    z = correlated_pair();
    for (int i = 0; i < 2; ++i) out.xi[i][k] = a * out.xi[i][k - 1] + p.sigma[i] * b * z[i];
  }
  return out;
}

}  // namespace ddforge
