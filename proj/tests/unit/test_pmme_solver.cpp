#include <cmath>
#include <random>
#include <vector>

#include "ddforge/error.hpp"
#include "ddforge/pmme_solver.hpp"
#include "doctest.h"

using namespace ddforge;

namespace {

// c' = -mu h, h' = c / tau - (1 / tau + mu) h, integrated by RK4.
double ode_oracle(double mu, double tau, double T, int steps = 20000) {
  double c = 1.0, h = 0.0;
  const double dt = T / steps;
  auto f = [&](double cc, double hh) {
    return std::pair{-mu * hh, cc / tau - (1.0 / tau + mu) * hh};
  };
  for (int n = 0; n < steps; ++n) {
    const auto [k1c, k1h] = f(c, h);
    const auto [k2c, k2h] = f(c + 0.5 * dt * k1c, h + 0.5 * dt * k1h);
    const auto [k3c, k3h] = f(c + 0.5 * dt * k2c, h + 0.5 * dt * k2h);
    const auto [k4c, k4h] = f(c + dt * k3c, h + dt * k3h);
    c += dt / 6.0 * (k1c + 2 * k2c + 2 * k3c + k4c);
    h += dt / 6.0 * (k1h + 2 * k2h + 2 * k3h + k4h);
  }
  return c;
}

Matrix4c sz(int q) {
  Matrix4c m = Matrix4c::Zero();
  for (int k = 0; k < 4; ++k) m(k, k) = z_eigenvalue(k, q);
  return m;
}

Matrix4c random_density(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Matrix4c a;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) a(r, c) = cplx(n(rng), n(rng));
  Matrix4c rho = a * a.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_SUITE("pmme_solver") {
  TEST_CASE("generator matches its definition") {
    const auto L = DephasingLindbladian::make(0.3, 0.6);
    std::mt19937_64 rng(3);
    const Matrix4c rho = random_density(rng);
    Matrix4c ref = Matrix4c::Zero();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Matrix4c zi = sz(i), zj = sz(j);
        ref += 0.5 * 0.3 * L.R(i, j) * (zi * rho * zj - 0.5 * (zi * zj * rho + rho * zi * zj));
      }
    CHECK((L.apply(rho) - ref).norm() < 1e-14);

    const auto S = superoperator(L);
    Eigen::Matrix<cplx, 16, 1> v = Eigen::Map<const Eigen::Matrix<cplx, 16, 1>>(rho.data());
    const Eigen::Matrix<cplx, 16, 1> w = S * v;
    CHECK((Eigen::Map<const Matrix4c>(w.data()) - ref).norm() < 1e-14);
    CHECK(std::abs(L.apply(rho).trace()) < 1e-14);
  }

  TEST_CASE("eigenrates") {
    const double g = 0.2;
    const auto L = DephasingLindbladian::make(g, 0.8);
    const auto rates = lindblad_eigenrates(L);
    for (int a = 0; a < 4; ++a) CHECK(rates(a, a) == 0.0);
    CHECK(coherence_rate(L, CoherencePair::bell()) == doctest::Approx(2.0 * g * (1.0 - 0.8)));
    CHECK(rates(1, 2) == doctest::Approx(2.0 * g * 0.2));
    CHECK(coherence_rate(DephasingLindbladian::make(g, 1.0), CoherencePair::from_basis(0, 3)) ==
          doctest::Approx(4.0 * g));
    CHECK(coherence_rate(L, CoherencePair::single(0)) == doctest::Approx(g));
    // Every element of |a><b| decays at its listed rate.
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        Matrix4c e = Matrix4c::Zero();
        e(a, b) = 1.0;
        CHECK(L.apply(e)(a, b).real() == doctest::Approx(-rates(a, b)));
      }
  }

  TEST_CASE("invalid parameters") {
    CHECK_THROWS_AS(DephasingLindbladian::make(-1.0, 0.5), InvalidArgument);
    CHECK_THROWS_AS(DephasingLindbladian::make(1.0, 1.5), InvalidArgument);
    CHECK_THROWS_AS((MemoryKernel{0.0}.validate()), InvalidArgument);
    const auto L = DephasingLindbladian::make(0.1, 0.5);
    CHECK_THROWS_AS(pmme_evolve_volterra(L, MemoryKernel{0.5}, states::psi_plus(), 0.02, 1.0), InvalidArgument);
  }

  TEST_CASE("scalar solution against an independent ODE integration") {
    const double tau = 0.5;
    for (double a : {0.05, 0.4, 0.9, 0.999999, 1.0, 1.0000001, 1.2, 1.6, 4.0}) {
      const double mu = a / tau;
      for (double t : {0.1, 0.7, 2.0, 5.0}) {
        const double ref = ode_oracle(mu, tau, t);
        CHECK(pmme_scalar_solution(mu, tau, t) == doctest::Approx(ref).epsilon(1e-9));
      }
    }
    CHECK(pmme_scalar_solution(0.3, 0.5, 0.0) == 1.0);
    CHECK(pmme_scalar_solution(0.0, 0.5, 3.0) == 1.0);
  }

  TEST_CASE("scalar solution is continuous through the confluent point") {
    const double tau = 0.5, t = 1.7;
    const double at = pmme_scalar_solution(1.0 / tau, tau, t);
    for (double d : {1e-10, 1e-7, 1e-4, 0.49, 0.51}) {
      CHECK(pmme_scalar_solution((1.0 + d) / tau, tau, t) == doctest::Approx(at).epsilon(2.0 * d + 1e-9));
      CHECK(pmme_scalar_solution((1.0 - d) / tau, tau, t) == doctest::Approx(at).epsilon(2.0 * d + 1e-9));
    }
  }

  TEST_CASE("Volterra stepping agrees with the analytic solution") {
    const auto L = DephasingLindbladian::make(0.12633, 0.3);
    const MemoryKernel k{0.5};
    std::mt19937_64 rng(11);
    const auto rho0 = DensityMatrix4::from_matrix(random_density(rng));
    const auto v = pmme_evolve_volterra(L, k, rho0, 0.01, 5.0);
    const auto a = pmme_evolve_analytic(L, k, rho0, v.times);
    REQUIRE(v.states.size() == a.states.size());
    double worst = 0.0;
    for (std::size_t n = 0; n < v.states.size(); ++n)
      worst = std::max(worst, (v.states[n] - a.states[n]).cwiseAbs().maxCoeff());
    CHECK(worst < 1e-5);
    CHECK(v.max_trace_drift < 1e-10);
    CHECK(v.positivity_violations == 0);
    CHECK(a.positivity_violations == 0);
    CHECK(v.times.back() == doctest::Approx(5.0));
  }

  TEST_CASE("populations are untouched and the coherence is real-positive") {
    const auto L = DephasingLindbladian::make(1.0, 0.0);
    const std::vector<double> ts{0.0, 0.5, 3.0, 10.0};
    const auto a = pmme_evolve_analytic(L, MemoryKernel{0.1}, states::psi_plus(), ts);
    for (const auto& s : a.states) {
      CHECK(s(1, 1).real() == doctest::Approx(0.5));
      CHECK(s(2, 2).real() == doctest::Approx(0.5));
      CHECK(s(1, 2).real() > 0.0);
    }
  }

  TEST_CASE("Markov limit recovers exponential decay") {
    const double g = 0.2;
    const auto L = DephasingLindbladian::make(g, 0.0);
    const double mu = coherence_rate(L, CoherencePair::bell());
    double prev = 1e300;
    for (double tau : {0.5, 0.05, 0.005}) {
      const auto traj = pmme_evolve_volterra(L, MemoryKernel{tau}, states::psi_plus(), tau / 50.0, 2.0);
      const auto c = chi_pm(traj, 1, 2);
      double resid = 0.0;
      for (std::size_t n = 0; n < c.curve.times.size(); ++n)
        resid = std::max(resid, std::abs(c.curve.chi[n] - mu * c.curve.times[n]));
      CHECK(resid < prev);
      prev = resid;
    }
    CHECK(prev < 1e-2 * mu * 2.0);
  }

  TEST_CASE("chi_pm and its rate") {
    const auto L = DephasingLindbladian::make(0.5, 0.0);
    const double mu = coherence_rate(L, CoherencePair::bell());
    std::vector<double> ts;
    for (int n = 0; n <= 400; ++n) ts.push_back(0.025 * n);
    const auto c = chi_pm(pmme_evolve_analytic(L, MemoryKernel{0.5}, states::psi_plus(), ts), 1, 2);
    CHECK(c.curve.method == ChiMethod::pmme);
    CHECK(c.curve.chi.front() == 0.0);
    CHECK(c.gamma_inst.back() == doctest::Approx(mu).epsilon(1e-3));
    for (std::size_t n = 1; n < c.curve.chi.size(); ++n) CHECK(c.curve.chi[n] >= c.curve.chi[n - 1]);
  }

  TEST_CASE("chi_pm truncates vanishing coherences") {
    const auto L = DephasingLindbladian::make(50.0, 0.0);
    std::vector<double> ts;
    for (int n = 0; n <= 100; ++n) ts.push_back(0.01 * n);
    const auto c = chi_pm(pmme_evolve_analytic(L, MemoryKernel{0.001}, states::psi_plus(), ts), 1, 2);
    CHECK(c.curve.times.size() < ts.size());
    for (double x : c.curve.chi) CHECK(std::isfinite(x));
  }
}
