#include "ddforge/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "ddforge/error.hpp"
#include "ddforge/optimizer.hpp"
#include "json.hpp"

namespace ddforge::app {
namespace {

using nlohmann::json;

// Reads one flat section, rejecting keys it does not know.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    node_ = &root.at(name_);
    if (!node_->is_object()) throw ConfigError(name_ + ": expected an object");
  }

  template <class T>
  Section& get(const char* key, T& out) {
    known_.emplace_back(key);
    if (!node_ || !node_->contains(key)) return *this;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(name_ + "." + key + ": wrong type");
    }
    return *this;
  }

  void done() const {
    if (!node_) return;
    for (const auto& [k, v] : node_->items()) {
      bool ok = false;
      for (const auto& known : known_) ok = ok || known == k;
      if (!ok) throw ConfigError(name_ + "." + k + ": unknown key");
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::vector<std::string> known_;
};

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key + ": " + what);
}

bool finite(std::initializer_list<double> xs) {
  for (double x : xs)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

OUNoiseParams NoiseConfig::params() const {
  return OUNoiseParams::from_lambda_khz(lambda_over_2pi_khz, tau_c_us, rho);
}

SwapModel SwapConfig::model() const {
  SwapModel m;
  m.f1 = f1_ghz;
  m.f2 = f2_ghz;
  m.J = J_ghz;
  m.gamma = gamma_per_ns;
  m.collapse = collapse == "sqrt_half_gamma" ? CollapseConvention::sqrt_half_gamma : CollapseConvention::sqrt_gamma;
  m.frame = rotating_frame ? SwapFrame::rotating : SwapFrame::lab;
  m.angular_coupling = angular_coupling;
  return m;
}

PulseErrorModel McConfig::errors(double sigma) const {
  PulseErrorModel e;
  e.tau_p_ns = tau_p_ns;
  e.sigma_eps = sigma;
  e.per_sequence_eps = per_sequence_eps;
  e.frozen_noise = frozen_noise;
  return e;
}

EnsembleOptions McConfig::options() const {
  EnsembleOptions o;
  o.n_traj = n_traj;
  o.seed = seed;
  o.concurrence = concurrence == "per_trajectory" ? ConcurrenceMode::per_trajectory : ConcurrenceMode::mean_state;
  return o;
}

void ExperimentConfig::validate() const {
  check(finite({noise.lambda_over_2pi_khz, noise.tau_c_us, noise.rho}), "noise", "values must be finite");
  check(noise.lambda_over_2pi_khz >= 0.0, "noise.lambda_over_2pi_khz", "must be >= 0");
  check(noise.tau_c_us > 0.0, "noise.tau_c_us", "must be > 0");
  check(std::abs(noise.rho) <= 1.0, "noise.rho", "must lie in [-1, 1]");

  check(finite({swap.f1_ghz, swap.f2_ghz, swap.J_ghz, swap.gamma_per_ns, swap.t_max_ns, swap.dt_out_ns}), "swap",
        "values must be finite");
  check(swap.f1_ghz >= 0.0 && swap.f2_ghz >= 0.0, "swap.f1_ghz/f2_ghz", "must be >= 0");
  check(swap.J_ghz >= 0.0, "swap.J_ghz", "must be >= 0");
  check(swap.gamma_per_ns >= 0.0, "swap.gamma_per_ns", "must be >= 0");
  check(swap.t_max_ns > 0.0, "swap.t_max_ns", "must be > 0");
  check(swap.dt_out_ns > 0.0 && swap.dt_out_ns <= swap.t_max_ns, "swap.dt_out_ns", "must lie in (0, t_max_ns]");
  check(swap.collapse == "sqrt_gamma" || swap.collapse == "sqrt_half_gamma", "swap.collapse",
        "must be sqrt_gamma or sqrt_half_gamma");
  check(swap.initial_state == "00" || swap.initial_state == "01" || swap.initial_state == "10" ||
            swap.initial_state == "11" || swap.initial_state == "psi_plus",
        "swap.initial_state", "must be 00, 01, 10, 11 or psi_plus");

  if (dd.protocol != "all") {
    try {
      parse_protocol(dd.protocol);
    } catch (const InvalidArgument&) {
      throw ConfigError("dd.protocol: must be all, no-dd, cpmg, udd, xy8 or tls-opt");
    }
  }
  check(dd.n_pulses >= 1 && dd.n_pulses <= 256, "dd.n_pulses", "must lie in [1, 256]");
  check(std::isfinite(dd.t_star_us) && dd.t_star_us > 0.0, "dd.t_star_us", "must be > 0");

  check(optimize.restarts >= 0, "optimize.restarts", "must be >= 0");
  check(optimize.max_iterations >= 1, "optimize.max_iterations", "must be >= 1");
  check(optimize.min_gap_us >= 0.0 && (dd.n_pulses + 1) * optimize.min_gap_us < dd.t_star_us,
        "optimize.min_gap_us", "must be >= 0 and leave room for n_pulses");

  check(!decay.rho_list.empty(), "decay.rho_list", "must not be empty");
  for (double r : decay.rho_list) check(std::abs(r) <= 1.0, "decay.rho_list", "entries must lie in [-1, 1]");
  check(std::isfinite(decay.t_max_us) && decay.t_max_us > 0.0, "decay.t_max_us", "must be > 0");
  check(decay.n_times >= 2, "decay.n_times", "must be >= 2");

  check(std::isfinite(filters.omega_max_per_us) && filters.omega_max_per_us > 0.0, "filters.omega_max_per_us",
        "must be > 0");
  check(filters.n_omega >= 2, "filters.n_omega", "must be >= 2");

  check(mc.n_traj >= 100, "mc.n_traj", "must be >= 100");
  check(std::isfinite(mc.tau_p_ns) && mc.tau_p_ns >= 0.0, "mc.tau_p_ns", "must be >= 0");
  check(!mc.sigma_eps.empty(), "mc.sigma_eps", "must not be empty");
  for (double s : mc.sigma_eps) check(std::isfinite(s) && s >= 0.0, "mc.sigma_eps", "entries must be >= 0");
  check(mc.concurrence == "mean_state" || mc.concurrence == "per_trajectory", "mc.concurrence",
        "must be mean_state or per_trajectory");
  check(std::isfinite(mc.t_max_us) && mc.t_max_us > 0.0, "mc.t_max_us", "must be > 0");
  check(mc.n_times >= 2, "mc.n_times", "must be >= 2");

  check(std::isfinite(pmme.t_max_us) && pmme.t_max_us > 0.0, "pmme.t_max_us", "must be > 0");
  check(pmme.dt_us > 0.0 && pmme.dt_us <= noise.tau_c_us / 50.0, "pmme.dt_us", "must lie in (0, tau_c_us / 50]");
  check(std::isfinite(pmme.gamma0_per_us) && pmme.gamma0_per_us >= 0.0, "pmme.gamma0_per_us", "must be >= 0");

  check(!output_dir.empty(), "output_dir", "must not be empty");
}

ExperimentConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");
  for (const auto& [k, v] : root.items()) {
    static const char* sections[] = {"noise", "swap", "dd", "optimize", "decay", "filters", "mc", "pmme", "output_dir"};
    bool ok = false;
    for (const char* s : sections) ok = ok || k == s;
    if (!ok) throw ConfigError(k + ": unknown section");
  }

  ExperimentConfig c;
  Section(root, "noise")
      .get("lambda_over_2pi_khz", c.noise.lambda_over_2pi_khz)
      .get("tau_c_us", c.noise.tau_c_us)
      .get("rho", c.noise.rho)
      .done();
  Section(root, "swap")
      .get("f1_ghz", c.swap.f1_ghz)
      .get("f2_ghz", c.swap.f2_ghz)
      .get("J_ghz", c.swap.J_ghz)
      .get("gamma_per_ns", c.swap.gamma_per_ns)
      .get("t_max_ns", c.swap.t_max_ns)
      .get("dt_out_ns", c.swap.dt_out_ns)
      .get("collapse", c.swap.collapse)
      .get("rotating_frame", c.swap.rotating_frame)
      .get("angular_coupling", c.swap.angular_coupling)
      .get("initial_state", c.swap.initial_state)
      .done();
  Section(root, "dd")
      .get("protocol", c.dd.protocol)
      .get("n_pulses", c.dd.n_pulses)
      .get("t_star_us", c.dd.t_star_us)
      .done();
  Section(root, "optimize")
      .get("restarts", c.optimize.restarts)
      .get("max_iterations", c.optimize.max_iterations)
      .get("min_gap_us", c.optimize.min_gap_us)
      .done();
  Section(root, "decay")
      .get("rho_list", c.decay.rho_list)
      .get("t_max_us", c.decay.t_max_us)
      .get("n_times", c.decay.n_times)
      .done();
  Section(root, "filters").get("omega_max_per_us", c.filters.omega_max_per_us).get("n_omega", c.filters.n_omega).done();
  Section(root, "mc")
      .get("n_traj", c.mc.n_traj)
      .get("seed", c.mc.seed)
      .get("tau_p_ns", c.mc.tau_p_ns)
      .get("sigma_eps", c.mc.sigma_eps)
      .get("per_sequence_eps", c.mc.per_sequence_eps)
      .get("frozen_noise", c.mc.frozen_noise)
      .get("concurrence", c.mc.concurrence)
      .get("t_max_us", c.mc.t_max_us)
      .get("n_times", c.mc.n_times)
      .done();
  Section(root, "pmme")
      .get("t_max_us", c.pmme.t_max_us)
      .get("dt_us", c.pmme.dt_us)
      .get("gamma0_per_us", c.pmme.gamma0_per_us)
      .done();
  if (root.contains("output_dir")) {
    if (!root["output_dir"].is_string()) throw ConfigError("output_dir: wrong type");
    c.output_dir = root["output_dir"].get<std::string>();
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

std::string config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["noise"] = {{"lambda_over_2pi_khz", c.noise.lambda_over_2pi_khz},
                {"tau_c_us", c.noise.tau_c_us},
                {"rho", c.noise.rho}};
  j["swap"] = {{"f1_ghz", c.swap.f1_ghz},
               {"f2_ghz", c.swap.f2_ghz},
               {"J_ghz", c.swap.J_ghz},
               {"gamma_per_ns", c.swap.gamma_per_ns},
               {"t_max_ns", c.swap.t_max_ns},
               {"dt_out_ns", c.swap.dt_out_ns},
               {"collapse", c.swap.collapse},
               {"rotating_frame", c.swap.rotating_frame},
               {"angular_coupling", c.swap.angular_coupling},
               {"initial_state", c.swap.initial_state}};
  j["dd"] = {{"protocol", c.dd.protocol}, {"n_pulses", c.dd.n_pulses}, {"t_star_us", c.dd.t_star_us}};
  j["optimize"] = {{"restarts", c.optimize.restarts},
                   {"max_iterations", c.optimize.max_iterations},
                   {"min_gap_us", c.optimize.min_gap_us}};
  j["decay"] = {{"rho_list", c.decay.rho_list}, {"t_max_us", c.decay.t_max_us}, {"n_times", c.decay.n_times}};
  j["filters"] = {{"omega_max_per_us", c.filters.omega_max_per_us}, {"n_omega", c.filters.n_omega}};
  j["mc"] = {{"n_traj", c.mc.n_traj},
             {"seed", c.mc.seed},
             {"tau_p_ns", c.mc.tau_p_ns},
             {"sigma_eps", c.mc.sigma_eps},
             {"per_sequence_eps", c.mc.per_sequence_eps},
             {"frozen_noise", c.mc.frozen_noise},
             {"concurrence", c.mc.concurrence},
             {"t_max_us", c.mc.t_max_us},
             {"n_times", c.mc.n_times}};
  j["pmme"] = {{"t_max_us", c.pmme.t_max_us}, {"dt_us", c.pmme.dt_us}, {"gamma0_per_us", c.pmme.gamma0_per_us}};
  j["output_dir"] = c.output_dir.string();
  return j.dump(2) + "\n";
}

}  // namespace ddforge::app
