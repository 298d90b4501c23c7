#include <cmath>
#include <cstdlib>
#include <vector>

#include "ddforge/error.hpp"
#include "ddforge/filter_engine.hpp"
#include "ddforge/trajectory_oracle.hpp"
#include "doctest.h"

using namespace ddforge;

namespace {

const OUNoiseParams kTable = OUNoiseParams::from_lambda_khz(80.0, 0.5, 0.8);

std::vector<double> grid(double T, int n) {
  std::vector<double> t;
  for (int k = 1; k <= n; ++k) t.push_back(T * k / n);
  return t;
}

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("DDFORGE_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("DDFORGE_THREADS"); }
};

}  // namespace

TEST_SUITE("trajectory_oracle") {
  TEST_CASE("input validation") {
    EnsembleOptions opt;
    opt.n_traj = 50;
    const auto t = grid(1.0, 4);
    CHECK_THROWS_AS(run_ideal(kTable, cpmg(4, 1.0), states::psi_plus(), t, opt), InvalidArgument);
    CHECK_THROWS_AS((PulseErrorModel{-1.0, 0.0, false, false}.validate()), InvalidArgument);
    CHECK_THROWS_AS((PulseErrorModel{10.0, -0.1, false, false}.validate()), InvalidArgument);
  }

  TEST_CASE("overlapping pulse windows are rejected") {
    EnsembleOptions opt;
    opt.n_traj = 100;
    const std::vector<double> t{0.05};
    const PulseErrorModel err{10.0, 0.0, false, false};
    CHECK_THROWS_AS(run_with_errors(kTable, cpmg(8, 0.05), err, states::psi_plus(), t, opt), InvalidArgument);
  }

  TEST_CASE("results do not depend on the worker count") {
    EnsembleOptions opt;
    opt.n_traj = 300;
    opt.seed = 99;
    opt.bootstrap = 20;
    const auto t = grid(2.0, 5);
    const PulseErrorModel err{10.0, 0.03, false, false};
    EnsembleResult a, b;
    {
      ThreadsEnv env("1");
      a = run_with_errors(kTable, cpmg(4, 2.0), err, states::psi_plus(), t, opt);
    }
    {
      ThreadsEnv env("3");
      b = run_with_errors(kTable, cpmg(4, 2.0), err, states::psi_plus(), t, opt);
    }
    CHECK(a.concurrence == b.concurrence);
    CHECK(a.fidelity == b.fidelity);
    CHECK(a.concurrence_se == b.concurrence_se);
    opt.seed = 100;
    const auto c = run_with_errors(kTable, cpmg(4, 2.0), err, states::psi_plus(), t, opt);
    CHECK(c.concurrence != a.concurrence);
  }

  TEST_CASE("common-mode noise leaves the Bell state intact") {
    EnsembleOptions opt;
    opt.n_traj = 200;
    const auto noise = OUNoiseParams::symmetric(0.5, 0.5, 1.0);
    const auto r = run_ideal(noise, free_evolution(3.0), states::psi_plus(), grid(3.0, 6), opt);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      CHECK(r.concurrence[k] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(r.fidelity[k] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("no noise and ideal pulses keep C = F = 1") {
    EnsembleOptions opt;
    opt.n_traj = 100;
    const auto quiet = OUNoiseParams::symmetric(0.0, 0.5, 0.8);
    const auto r = run_ideal(quiet, xy8(1.0, 1), states::psi_plus(), grid(1.0, 8), opt);
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      CHECK(r.concurrence[k] == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.fidelity[k] == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("error-free pulses reproduce the ideal engine") {
    EnsembleOptions opt;
    opt.n_traj = 200;
    opt.seed = 5;
    const auto t = grid(2.0, 4);
    const auto a = run_ideal(kTable, udd(6, 2.0), states::psi_plus(), t, opt);
    const auto b = run_with_errors(kTable, udd(6, 2.0), PulseErrorModel{}, states::psi_plus(), t, opt);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(a.concurrence[k] == doctest::Approx(b.concurrence[k]).epsilon(1e-12));
      CHECK(a.fidelity[k] == doctest::Approx(b.fidelity[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("ensemble coherence converges to exp(-chi)") {
    EnsembleOptions opt;
    opt.n_traj = 4000;
    opt.seed = 2024;
    const auto t = grid(20.0, 5);
    for (const auto& seq : {free_evolution(20.0), cpmg(8, 20.0)}) {
      const auto r = run_ideal(kTable, seq, states::psi_plus(), t, opt);
      for (std::size_t k = 0; k < t.size(); ++k) {
        const double chi = chi_time_domain(kTable, seq.truncated(t[k]), CoherencePair::bell());
        CHECK(std::abs(r.concurrence[k] - std::exp(-chi)) < 4.0 * r.concurrence_se[k] + 1e-9);
        CHECK(r.concurrence_se[k] > 0.0);
      }
    }
  }

  TEST_CASE("flip-angle errors accumulate with the pulse count") {
    EnsembleOptions opt;
    opt.n_traj = 400;
    opt.seed = 8;
    const auto quiet = OUNoiseParams::symmetric(0.0, 0.5, 0.8);
    const PulseErrorModel err{10.0, 0.05, false, false};
    const std::vector<double> t{1.0};
    const auto few = run_with_errors(quiet, cpmg(4, 1.0), err, states::psi_plus(), t, opt);
    const auto many = run_with_errors(quiet, cpmg(16, 1.0), err, states::psi_plus(), t, opt);
    CHECK(1.0 - few.fidelity[0] > 0.0);
    CHECK(1.0 - many.fidelity[0] > 1.0 - few.fidelity[0]);
  }

  TEST_CASE("per-trajectory concurrence bounds the mean-state value") {
    EnsembleOptions opt;
    opt.n_traj = 300;
    opt.bootstrap = 30;
    opt.concurrence = ConcurrenceMode::per_trajectory;
    const PulseErrorModel err{10.0, 0.05, false, false};
    const auto t = grid(4.0, 4);
    const auto r = run_with_errors(kTable, cpmg(8, 4.0), err, states::psi_plus(), t, opt);
    REQUIRE(r.trajectory_concurrence.size() == t.size());
    opt.concurrence = ConcurrenceMode::mean_state;
    const auto m = run_with_errors(kTable, cpmg(8, 4.0), err, states::psi_plus(), t, opt);
    // Concurrence is convex, so the mean of pure-state values is at least
    // the value of the mean state.
    for (std::size_t k = 0; k < t.size(); ++k) CHECK(r.concurrence[k] >= m.concurrence[k] - 1e-12);
  }

  TEST_CASE("storage sweep shares random numbers across cases") {
    EnsembleOptions opt;
    opt.n_traj = 300;
    opt.bootstrap = 40;
    const std::vector<double> ts{2.0, 4.0, 8.0, 16.0, 32.0};
    const std::vector<SweepCase> cases{{free_family(), {}}, {free_family(), {}}, {cpmg_family(8), {}}};
    const auto res = run_storage_sweep(kTable, cases, states::psi_plus(), ts, opt);
    REQUIRE(res.size() == 3);
    CHECK(res[0].concurrence == res[1].concurrence);
    CHECK(res[2].concurrence.back() > res[0].concurrence.back());
    const auto a = ensemble_tau_c(res[0]);
    const auto b = ensemble_tau_c(res[1]);
    REQUIRE(a.value.has_value());
    CHECK(*a.value == *b.value);
    CHECK(a.replicates.size() == 40);
    CHECK(a.std_error > 0.0);
    for (std::size_t k = 0; k < a.replicates.size(); ++k)
      if (!std::isnan(a.replicates[k])) CHECK(a.replicates[k] == b.replicates[k]);
  }
}
