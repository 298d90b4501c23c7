#pragma once

#include <iosfwd>

#include "ddforge/config.hpp"

namespace ddforge::app {

// Each command validates the config, writes its files into cfg.output_dir
// and returns a process exit code. Progress lines go to `log`.
int cmd_swap(const ExperimentConfig& cfg, std::ostream& log);
int cmd_decay(const ExperimentConfig& cfg, std::ostream& log);
int cmd_filters(const ExperimentConfig& cfg, std::ostream& log);
int cmd_optimize(const ExperimentConfig& cfg, std::ostream& log);
int cmd_robustness(const ExperimentConfig& cfg, std::ostream& log);
int cmd_pmme(const ExperimentConfig& cfg, std::ostream& log);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace ddforge::app
