#include <cmath>
#include <random>
#include <vector>

#include "ddforge/entanglement_metrics.hpp"
#include "ddforge/error.hpp"
#include "doctest.h"

using namespace ddforge;

namespace {

Vector4c random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Vector4c v;
  for (int k = 0; k < 4; ++k) v(k) = cplx(n(rng), n(rng));
  return v.normalized();
}

}  // namespace

TEST_SUITE("entanglement_metrics") {
  TEST_CASE("density matrix invariants") {
    const auto bell = states::psi_plus();
    CHECK(bell.purity() == doctest::Approx(1.0));
    CHECK(bell.min_eigenvalue() > -1e-12);
    CHECK(states::maximally_mixed().purity() == doctest::Approx(0.25));
    Matrix4c bad = Matrix4c::Identity() * 0.5;
    CHECK_THROWS_AS(DensityMatrix4::from_matrix(bad), InvalidArgument);
    Matrix4c neg = Matrix4c::Zero();
    neg(0, 0) = 1.2;
    neg(1, 1) = -0.2;
    CHECK_THROWS_AS(DensityMatrix4::from_matrix(neg), InvalidArgument);
    CHECK(z_eigenvalue(basis_index(1, 0), 0) == -1);
    CHECK(z_eigenvalue(basis_index(1, 0), 1) == 1);
  }

  TEST_CASE("pure dephasing of the Bell state") {
    const auto m0 = bell_concurrence_fidelity(0.0);
    CHECK(m0.concurrence == 1.0);
    CHECK(m0.fidelity == 1.0);
    const auto m = bell_concurrence_fidelity(0.7);
    CHECK(m.concurrence == doctest::Approx(std::exp(-0.7)));
    CHECK(m.fidelity == doctest::Approx(0.5 * (1.0 + std::exp(-0.7))));
    CHECK_THROWS_AS(bell_concurrence_fidelity(-1e-3), InvalidArgument);
  }

  TEST_CASE("X-state formula agrees with Wootters") {
    XState x{0.1, 0.35, 0.45, 0.1, cplx(0.3, 0.1)};
    Matrix4c rho = Matrix4c::Zero();
    rho(0, 0) = x.p00;
    rho(1, 1) = x.p01;
    rho(2, 2) = x.p10;
    rho(3, 3) = x.p11;
    rho(1, 2) = x.coherence;
    rho(2, 1) = std::conj(x.coherence);
    const double expect = std::max(0.0, 2.0 * std::abs(x.coherence) - 2.0 * std::sqrt(x.p00 * x.p11));
    CHECK(xstate_concurrence(x) == doctest::Approx(expect));
    CHECK(concurrence_general(rho) == doctest::Approx(expect).epsilon(1e-9));
    XState bad{0.5, 0.5, 0.5, 0.0, {}};
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  }

  TEST_CASE("Wootters concurrence of pure states is 2|ad - bc|") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 50; ++k) {
      const Vector4c psi = random_state(rng);
      const double expect = 2.0 * std::abs(psi(0) * psi(3) - psi(1) * psi(2));
      CHECK(concurrence_general(DensityMatrix4::pure(psi)) == doctest::Approx(expect).epsilon(1e-7));
    }
    CHECK(concurrence_general(states::psi_plus()) == doctest::Approx(1.0));
    CHECK(concurrence_general(states::basis(1)) == doctest::Approx(0.0));
  }

  TEST_CASE("Werner states") {
    for (double p : {0.0, 0.2, 1.0 / 3.0, 0.5, 0.9, 1.0}) {
      const Matrix4c rho = p * states::psi_plus().matrix() + (1.0 - p) * Matrix4c::Identity() / 4.0;
      const double expect = std::max(0.0, 1.5 * p - 0.5);
      CHECK(concurrence_general(rho) == doctest::Approx(expect).epsilon(1e-8));
      CHECK(bell_fidelity(rho) == doctest::Approx(p + (1.0 - p) / 4.0));
    }
  }

  TEST_CASE("concurrence rejects non-positive input") {
    Matrix4c rho = Matrix4c::Zero();
    rho(1, 1) = 0.5;
    rho(2, 2) = 0.5;
    rho(1, 2) = 0.9;
    rho(2, 1) = 0.9;
    CHECK_THROWS_AS(concurrence_general(rho), InvalidArgument);
  }

  TEST_CASE("monotone cubic preserves monotonicity and interpolates") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> y{1.0, 0.9, 0.2, 0.19, 0.0};
    MonotoneCubic f(x, y);
    for (std::size_t k = 0; k < x.size(); ++k) CHECK(f(x[k]) == doctest::Approx(y[k]));
    double prev = f(0.0);
    for (int k = 1; k <= 400; ++k) {
      const double v = f(4.0 * k / 400.0);
      CHECK(v <= prev + 1e-14);
      prev = v;
    }
  }

  TEST_CASE("first crossing") {
    std::vector<double> t, v;
    for (int k = 0; k <= 100; ++k) {
      t.push_back(0.05 * k);
      v.push_back(std::exp(-t.back()));
    }
    const auto c = first_crossing(t, v, kConcurrenceThreshold);
    REQUIRE(c.has_value());
    CHECK(*c == doctest::Approx(1.0).epsilon(1e-5));
    CHECK_FALSE(first_crossing(t, v, 1e-3).has_value());
    CHECK(first_crossing(t, v, 1.5).value() == 0.0);
    v[50] = std::nan("");
    CHECK_THROWS_AS(first_crossing(t, v, 0.5), NumericalError);
    const std::vector<double> bad_t{0.0, 0.0};
    const std::vector<double> bad_v{1.0, 0.5};
    CHECK_THROWS_AS(first_crossing(bad_t, bad_v, 0.7), InvalidArgument);
  }

  TEST_CASE("free evolution lifetimes match the closed form") {
    const auto noise = OUNoiseParams::symmetric(0.5, 0.5, 0.8);
    const auto rep = protocol_lifetimes(noise, free_family(), CoherencePair::bell());
    REQUIRE(rep.tau_c.has_value());
    REQUIRE(rep.t_0999.has_value());
    CHECK(chi_closed_form_free(noise, *rep.tau_c).bell == doctest::Approx(1.0).epsilon(1e-6));
    const double chi_f = -std::log(2.0 * kFidelityThreshold - 1.0);
    CHECK(chi_closed_form_free(noise, *rep.t_0999).bell == doctest::Approx(chi_f).epsilon(1e-5));
    CHECK(*rep.t_0999 < *rep.tau_c);
  }

  TEST_CASE("perfectly correlated noise never crosses") {
    const auto noise = OUNoiseParams::symmetric(0.5, 0.5, 1.0);
    const auto rep = protocol_lifetimes(noise, free_family(), CoherencePair::bell(), {1.0, 8.0, 50});
    CHECK_FALSE(rep.tau_c.has_value());
    CHECK_FALSE(rep.t_0999.has_value());
    CHECK(rep.window_end == doctest::Approx(8.0));
  }
}
