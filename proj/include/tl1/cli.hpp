#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "tl1/harness.hpp"

namespace tl1 {

/// Read a JSON config file and overlay flat key=value overrides. Values are
/// parsed as JSON when possible ("1e-6", "[5,10]") and kept as strings
/// otherwise ("S2"). Throws on a missing file or invalid JSON.
nlohmann::json load_config_json(const std::string& path,
                                const std::vector<std::string>& overrides);

/// Typed config parsers. Unknown keys are rejected; schema errors name the
/// offending key. Defaults: a=1, mu_eps=0.01, max_iter=3000, rel_tol=1e-8,
/// warm_start_iters=20; success_tol 1e-3 noiseless, 1e-2 with noise.
SolverConfig parse_solver_config(const nlohmann::json& j);
ExperimentSpec parse_experiment_spec(const nlohmann::json& j);
RobustnessSpec parse_robustness_spec(const nlohmann::json& j);

/// Write to `path` atomically (temp file + rename); "-" writes to stdout.
void write_output(const std::string& path, const std::string& content);

/// Entry point behind main(): exit 0 on success, 1 on usage/config errors,
/// 2 on runtime errors. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace tl1
