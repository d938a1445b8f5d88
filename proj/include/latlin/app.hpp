#pragma once

// Command drivers shared by the C API and the command-line tool. Each takes a
// JSON request and returns a JSON result with a top-level boolean "passed".

#include "latlin/config.hpp"

#include <string>

namespace latlin {

/// Simulation config (see simulation_from_json); writes the optional outputs.
Json app_simulate(const Json& config);

/// Sweep config; writes report.csv, gateaux.csv, levels.csv, summary.json to out_dir.
Json app_converge(const Json& config, const std::string& out_dir);

/// {"model": ..., "lattice"?: {dim, basis}, "skew_samples"?: 100, "seed"?: 1}
Json app_tensor(const Json& request);

/// {"model": ..., "lattice"?: {dim, basis}, "trials"?: 200, "seed"?: 1}
Json app_check_model(const Json& request);

/// Re-audits a binary trajectory file.
Json app_audit(const std::string& trajectory_path, double edie_tolerance = 1e-6);

/// Recovery config (see recovery_from_json).
Json app_recover(const Json& config);

}  // namespace latlin
