#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ddforge/commands.hpp"
#include "ddforge/config.hpp"
#include "doctest.h"

using namespace ddforge::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ddforge_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults") {
    const ExperimentConfig cfg;
    CHECK(cfg.noise.lambda_over_2pi_khz == 80.0);
    CHECK(cfg.noise.tau_c_us == 0.5);
    CHECK(cfg.noise.rho == 0.8);
    CHECK(cfg.dd.n_pulses == 8);
    CHECK(cfg.swap.f1_ghz == 0.60);
    CHECK(cfg.swap.f2_ghz == 0.62);
    CHECK(cfg.swap.J_ghz == 0.02);
    CHECK(cfg.swap.gamma_per_ns == 0.001);
    CHECK(cfg.mc.tau_p_ns == 10.0);
    CHECK_NOTHROW(cfg.validate());
  }

  TEST_CASE("JSON round trip and partial overrides") {
    ExperimentConfig cfg;
    cfg.noise.rho = 0.3;
    cfg.mc.sigma_eps = {0.0, 0.1};
    cfg.swap.collapse = "sqrt_half_gamma";
    const auto back = config_from_json(config_to_json(cfg));
    CHECK(back.noise.rho == 0.3);
    CHECK(back.mc.sigma_eps == cfg.mc.sigma_eps);
    CHECK(back.swap.collapse == "sqrt_half_gamma");
    const auto partial = config_from_json(R"({"dd": {"n_pulses": 4}})");
    CHECK(partial.dd.n_pulses == 4);
    CHECK(partial.dd.t_star_us == 1.0);
  }

  TEST_CASE("strict parsing") {
    CHECK_THROWS_AS(config_from_json(R"({"noise": {"lambda": 1}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"extra": {}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json(R"({"dd": {"n_pulses": "eight"}})"), ConfigError);
    CHECK_THROWS_AS(config_from_json("{not json"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/ddforge.json"), ConfigError);
  }

  TEST_CASE("validation names the offending key") {
    ExperimentConfig cfg;
    cfg.dd.n_pulses = 0;
    try {
      cfg.validate();
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("dd.n_pulses") != std::string::npos);
    }
    cfg = {};
    cfg.noise.rho = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.swap.initial_state = "2";
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.mc.n_traj = 10;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
  }

  TEST_CASE("decay output starts at full coherence") {
    ExperimentConfig cfg;
    cfg.output_dir = scratch("decay");
    cfg.decay.n_times = 11;
    std::ostringstream log;
    REQUIRE(cmd_decay(cfg, log) == kExitOk);
    const auto rows = lines(cfg.output_dir / "fig2.csv");
    REQUIRE(rows.size() == 1 + 4 * 11);
    CHECK(rows[0].rfind("rho,t_us,", 0) == 0);
    CHECK(rows[1] == "0,0,0,0,1,1,0,1");
    fs::remove_all(cfg.output_dir);
  }

  TEST_CASE("swap output is deterministic and stays separable without coupling") {
    ExperimentConfig cfg;
    cfg.output_dir = scratch("swap_a");
    cfg.swap.t_max_ns = 20.0;
    std::ostringstream log;
    REQUIRE(cmd_swap(cfg, log) == kExitOk);
    auto again = cfg;
    again.output_dir = scratch("swap_b");
    REQUIRE(cmd_swap(again, log) == kExitOk);
    CHECK(slurp(cfg.output_dir / "fig1b.csv") == slurp(again.output_dir / "fig1b.csv"));
    CHECK(lines(cfg.output_dir / "fig1b.csv").size() == 202);

    auto uncoupled = cfg;
    uncoupled.swap.J_ghz = 0.0;
    REQUIRE(cmd_swap(uncoupled, log) == kExitOk);
    const auto rows = lines(cfg.output_dir / "fig1b.csv");
    for (std::size_t k = 1; k < rows.size(); ++k) {
      const auto a = rows[k].find(','), b = rows[k].find(',', a + 1);
      CHECK(std::stod(rows[k].substr(a + 1, b - a - 1)) == 0.0);
    }
    fs::remove_all(cfg.output_dir);
    fs::remove_all(again.output_dir);
  }

  TEST_CASE("robustness output is byte-identical for a fixed seed") {
    ExperimentConfig cfg;
    cfg.mc.n_traj = 100;
    cfg.mc.sigma_eps = {0.0, 0.05};
    cfg.mc.n_times = 6;
    cfg.mc.t_max_us = 30.0;
    cfg.dd.protocol = "cpmg";
    cfg.output_dir = scratch("rob_a");
    std::ostringstream log;
    REQUIRE(cmd_robustness(cfg, log) == kExitOk);
    auto again = cfg;
    again.output_dir = scratch("rob_b");
    REQUIRE(cmd_robustness(again, log) == kExitOk);
    CHECK(slurp(cfg.output_dir / "fig4c.csv") == slurp(again.output_dir / "fig4c.csv"));
    CHECK(slurp(cfg.output_dir / "fig4c_curves.csv") == slurp(again.output_dir / "fig4c_curves.csv"));
    fs::remove_all(cfg.output_dir);
    fs::remove_all(again.output_dir);
  }
}
