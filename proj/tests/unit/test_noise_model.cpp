#include <cmath>
#include <numbers>
#include <numeric>

#include "ddforge/error.hpp"
#include "ddforge/noise_model.hpp"
#include "doctest.h"

using namespace ddforge;

namespace {

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

double covariance(const std::vector<double>& a, const std::vector<double>& b, std::size_t lag = 0) {
  const double ma = mean(a), mb = mean(b);
  double s = 0.0;
  const std::size_t n = a.size() - lag;
  for (std::size_t k = 0; k < n; ++k) s += (a[k] - ma) * (b[k + lag] - mb);
  return s / n;
}

}  // namespace

TEST_SUITE("noise_model") {
  TEST_CASE("kHz amplitude converts to rad/us and sigma = lambda / sqrt 2") {
    const auto p = OUNoiseParams::from_lambda_khz(80.0, 0.5, 0.8);
    const double lambda = 2.0 * std::numbers::pi * 0.08;
    CHECK(p.lambda(0) == doctest::Approx(lambda).epsilon(1e-14));
    CHECK(p.sigma[1] == doctest::Approx(lambda / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(p.rho() == 0.8);
    CHECK(khz_to_rad_per_us(1000.0) == doctest::Approx(2.0 * std::numbers::pi));
  }

  TEST_CASE("invalid parameters are rejected") {
    Eigen::Matrix2d r;
    r << 1.0, 0.5, 0.5, 1.0;
    CHECK_THROWS_AS(OUNoiseParams::make({-1.0, 1.0}, 0.5, r), InvalidArgument);
    CHECK_THROWS_AS(OUNoiseParams::make({1.0, 1.0}, 0.0, r), InvalidArgument);
    CHECK_THROWS_AS(OUNoiseParams::symmetric(1.0, 0.5, 1.2), InvalidArgument);
    Eigen::Matrix2d asym;
    asym << 1.0, 0.5, 0.4, 1.0;
    CHECK_THROWS_AS(OUNoiseParams::make({1.0, 1.0}, 0.5, asym), InvalidArgument);
    Eigen::Matrix2d diag;
    diag << 2.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(OUNoiseParams::make({1.0, 1.0}, 0.5, diag), InvalidArgument);
    CHECK_NOTHROW(OUNoiseParams::symmetric(0.0, 0.5, -1.0));
  }

  TEST_CASE("spectral density is the Fourier transform of the correlation") {
    const auto p = OUNoiseParams::symmetric(0.7, 0.5, 0.6);
    for (double omega : {0.0, 0.3, 2.0, 11.0}) {
      // int_{-inf}^{inf} C_12(tau) cos(omega tau) d tau by the trapezoid rule.
      const double L = 40.0 * p.tau_c;
      const int n = 400000;
      const double h = 2.0 * L / n;
      double acc = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double tau = -L + k * h;
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        acc += w * correlation(p, 0, 1, tau) * std::cos(omega * tau);
      }
      CHECK(acc * h == doctest::Approx(spectral_density(p, 0, 1, omega)).epsilon(1e-6));
    }
    CHECK(correlation(p, 0, 0, -0.2) == doctest::Approx(p.sigma[0] * p.sigma[0] * std::exp(-0.4)));
  }

  TEST_CASE("sampled paths have the OU variance, memory and cross correlation") {
    const auto p = OUNoiseParams::symmetric(0.5, 0.5, 0.8);
    const double dt = 0.025;
    const auto paths = sample_paths(p, dt, 400000, 7);
    const double s2 = p.sigma[0] * p.sigma[0];
    CHECK(covariance(paths.xi[0], paths.xi[0]) == doctest::Approx(s2).epsilon(0.04));
    CHECK(covariance(paths.xi[1], paths.xi[1]) == doctest::Approx(s2).epsilon(0.04));
    CHECK(covariance(paths.xi[0], paths.xi[1]) / s2 == doctest::Approx(0.8).epsilon(0.03));
    const double lag = 10;
    CHECK(covariance(paths.xi[0], paths.xi[0], lag) / covariance(paths.xi[0], paths.xi[0]) ==
          doctest::Approx(std::exp(-lag * dt / p.tau_c)).epsilon(0.04));
  }

  TEST_CASE("sampling is deterministic per seed") {
    const auto p = OUNoiseParams::symmetric(0.5, 0.5, 0.3);
    const auto a = sample_paths(p, 0.01, 1000, 42);
    const auto b = sample_paths(p, 0.01, 1000, 42);
    const auto c = sample_paths(p, 0.01, 1000, 43);
    CHECK(a.xi[0] == b.xi[0]);
    CHECK(a.xi[1] == b.xi[1]);
    CHECK(a.xi[0] != c.xi[0]);
  }

  TEST_CASE("fully correlated noise gives identical paths") {
    const auto p = OUNoiseParams::symmetric(0.5, 0.5, 1.0);
    const auto a = sample_paths(p, 0.01, 500, 3);
    CHECK(a.xi[0] == a.xi[1]);
  }

  TEST_CASE("scaled multiplies both amplitudes") {
    const auto p = OUNoiseParams::symmetric(0.5, 0.5, 0.3).scaled(2.0);
    CHECK(p.lambda(0) == doctest::Approx(1.0));
    CHECK(p.lambda(1) == doctest::Approx(1.0));
  }
}
