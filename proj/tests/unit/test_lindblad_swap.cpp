#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <vector>

#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"
#include "ddforge/lindblad_swap.hpp"
#include "doctest.h"

using namespace ddforge;

namespace {

using Super = Eigen::Matrix<cplx, 16, 16>;
using Vec16 = Eigen::Matrix<cplx, 16, 1>;

std::vector<double> grid(double T, int n) {
  std::vector<double> t;
  for (int k = 0; k <= n; ++k) t.push_back(T * k / n);
  return t;
}

// Independent Liouvillian from Kronecker products, vec(A X B) = (B^T (x) A) vec X.
Super liouvillian(const Matrix4c& H, double rate) {
  auto kron = [](const Matrix4c& a, const Matrix4c& b) {
    Super k;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) k.block<4, 4>(4 * i, 4 * j) = a(i, j) * b;
    return k;
  };
  const Matrix4c I = Matrix4c::Identity();
  const cplx im(0.0, 1.0);
  Super L = -im * (kron(I, H) - kron(H.transpose(), I));
  for (int q = 0; q < 2; ++q) {
    Matrix4c z = Matrix4c::Zero();
    for (int k = 0; k < 4; ++k) z(k, k) = z_eigenvalue(k, q);
    L += rate * (kron(z.transpose(), z) - kron(I, I));
  }
  return L;
}

Matrix4c propagate(const Super& L, const Matrix4c& rho0, double t) {
  Eigen::ComplexEigenSolver<Super> es(L);
  const Super V = es.eigenvectors();
  Vec16 d;
  for (int k = 0; k < 16; ++k) d(k) = std::exp(es.eigenvalues()(k) * t);
  const Vec16 v0 = Eigen::Map<const Vec16>(rho0.data());
  const Vec16 v = V * d.asDiagonal() * V.partialPivLu().solve(v0);
  return Eigen::Map<const Matrix4c>(v.data());
}

}  // namespace

TEST_SUITE("lindblad_swap") {
  TEST_CASE("model parameters") {
    SwapModel m;
    CHECK(m.detuning() == doctest::Approx(2 * std::numbers::pi * 0.02));
    CHECK(m.coupling() == doctest::Approx(2 * std::numbers::pi * 0.02));
    CHECK(m.splitting() == doctest::Approx(0.280993).epsilon(1e-6));
    m.angular_coupling = false;
    CHECK(m.coupling() == 0.02);
    m.gamma = -1.0;
    CHECK_THROWS_AS(m.validate(), InvalidArgument);
    CHECK(m.hamiltonian().isApprox(m.hamiltonian().adjoint()));
  }

  TEST_CASE("resonant exchange without noise gives C = |sin 2gt|") {
    SwapModel m;
    m.f2 = m.f1;
    m.gamma = 0.0;
    const auto t = grid(50.0, 500);
    const auto tr = evolve_swap(m, states::basis(basis_index(1, 0)), t);
    const double g = m.coupling();
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(tr.concurrence[k] == doctest::Approx(std::abs(std::sin(2 * g * t[k]))).epsilon(1e-7));
      CHECK(tr.p01[k] == doctest::Approx(std::pow(std::sin(g * t[k]), 2)).epsilon(1e-7));
      CHECK(tr.purity[k] == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("detuned Rabi formula") {
    SwapModel m;
    m.gamma = 0.0;
    const auto t = grid(100.0, 400);
    const auto tr = evolve_swap(m, states::basis(basis_index(1, 0)), t);
    const double g = m.coupling(), W = m.splitting();
    for (std::size_t k = 0; k < t.size(); ++k)
      CHECK(tr.p01[k] + 1.0 == doctest::Approx(1.0 + 4 * g * g / (W * W) * std::pow(std::sin(W * t[k] / 2), 2)).epsilon(1e-9));
  }

  TEST_CASE("pure dephasing of the Bell state in both conventions") {
    SwapModel m;
    m.J = 0.0;
    m.f2 = m.f1;
    m.gamma = 0.01;
    const auto t = grid(100.0, 100);
    auto tr = evolve_swap(m, states::psi_plus(), t);
    for (std::size_t k = 0; k < t.size(); ++k)
      CHECK(tr.concurrence[k] == doctest::Approx(std::exp(-4 * m.gamma * t[k])).epsilon(1e-8));
    m.collapse = CollapseConvention::sqrt_half_gamma;
    tr = evolve_swap(m, states::psi_plus(), t);
    for (std::size_t k = 0; k < t.size(); ++k)
      CHECK(tr.concurrence[k] == doctest::Approx(std::exp(-2 * m.gamma * t[k])).epsilon(1e-8));
  }

  TEST_CASE("agrees with an exact Liouvillian exponential") {
    SwapModel m;
    m.gamma = 0.004;
    const auto t = grid(200.0, 40);
    const Matrix4c rho0 = states::basis(basis_index(1, 0)).matrix();
    const auto tr = evolve_swap(m, states::basis(basis_index(1, 0)), t);
    const Super L = liouvillian(m.hamiltonian(), m.gamma);
    for (std::size_t k = 0; k < t.size(); ++k) {
      const Matrix4c ref = propagate(L, rho0, t[k]);
      CHECK((tr.states[k] - ref).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(tr.concurrence[k] == doctest::Approx(concurrence_general(ref)).epsilon(1e-6));
    }
    CHECK(tr.max_trace_drift < 1e-12);
  }

  TEST_CASE("lab and rotating frames report the same observables") {
    SwapModel lab;
    SwapModel rot = lab;
    rot.frame = SwapFrame::rotating;
    const auto t = grid(200.0, 2000);
    const auto a = evolve_swap(lab, states::basis(basis_index(1, 0)), t);
    const auto b = evolve_swap(rot, states::basis(basis_index(1, 0)), t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(a.concurrence[k] == doctest::Approx(b.concurrence[k]).epsilon(1e-8));
      CHECK(a.p01[k] == doctest::Approx(b.p01[k]).epsilon(1e-8));
      CHECK(a.fidelity[k] == doctest::Approx(b.fidelity[k]).epsilon(1e-8));
    }
  }

  TEST_CASE("no coupling, no entanglement") {
    SwapModel m;
    m.J = 0.0;
    const auto tr = evolve_swap(m, states::basis(basis_index(1, 0)), grid(100.0, 100));
    for (double c : tr.concurrence) CHECK(c == 0.0);
    for (double p : tr.p00_plus_p11) CHECK(p == doctest::Approx(0.0));
  }

  TEST_CASE("bad grids are rejected") {
    const std::vector<double> t{0.0, 1.0, 0.5};
    CHECK_THROWS_AS(evolve_swap(SwapModel{}, states::psi_plus(), t), InvalidArgument);
  }

  TEST_CASE("peak analysis on a damped cosine") {
    const double w = 0.28, tau = 300.0;
    const auto t = grid(1500.0, 15000);
    std::vector<double> y;
    for (double x : t) y.push_back(0.3 + std::exp(-x / tau) * std::cos(w * x));
    const auto peaks = find_peaks(t, y);
    REQUIRE(peaks.size() > 10);
    CHECK(peaks[0].time == doctest::Approx(2 * std::numbers::pi / w).epsilon(5e-3));
    CHECK(oscillation_frequency(t, y).value() == doctest::Approx(w).epsilon(1e-3));
    CHECK(envelope_time_constant(t, y).value() == doctest::Approx(tau).epsilon(1e-2));
    CHECK(find_troughs(t, y).front().time == doctest::Approx(std::numbers::pi / w).epsilon(1e-2));
    const std::vector<double> flat(t.size(), 1.0);
    CHECK_FALSE(oscillation_frequency(t, flat).has_value());
  }
}
