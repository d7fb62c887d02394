#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "stiffchaos/cli/config.hpp"

namespace stiffchaos::cli {

/// Each command writes its CSV files and manifest.json into cfg.out_dir and
/// returns the manifest. `echo` is the merged configuration document.
nlohmann::json cmd_solve(const ExperimentConfig& cfg, const nlohmann::json& echo);
nlohmann::json cmd_diagnose(const ExperimentConfig& cfg, const nlohmann::json& echo);
nlohmann::json cmd_transform(const ExperimentConfig& cfg, const nlohmann::json& echo);
nlohmann::json cmd_demo_stiff_transform(const ExperimentConfig& cfg, const nlohmann::json& echo);

/// One row per run. All runs must share problem, time grid and oracle
/// refinement, otherwise MismatchedBaseline is thrown. The baseline is the
/// first run with method none, or the first run when there is none.
nlohmann::json cmd_compare(const std::vector<ExperimentConfig>& runs,
                           const std::vector<nlohmann::json>& echoes);

/// Full command-line entry point. Returns the process exit code:
/// 0 success (including stagnated adaptive runs), 1 configuration error,
/// 2 numerical failure.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace stiffchaos::cli
