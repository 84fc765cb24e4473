#pragma once
// Config-file plumbing for the command-line tool.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tmsq/analysis.hpp"
#include "tmsq/io.hpp"
#include "tmsq/protocol.hpp"

namespace tmsq::cli {

// Either a parameter set (top level, optional "run" section) or a full
// protocol (a "steps" array) read from one file.
struct RunConfig {
  std::optional<PhysicalParams> params;  // as written in the file
  std::optional<ProtocolSpec> protocol;  // set when the file lists steps
  ProtocolSpec defaults;                 // engine, truncation, seed, ... from "run"
  InitialCondition initial;
  double n_target = kDefaultStepTarget;
  std::optional<double> step_duration;
  Fig2Settings fig2;
  std::vector<double> r_grid;
};

// Throws ConfigError naming the offending key.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const Json& j);

// Step-1 parameters; Θ₁ < Θ₂ sets are swapped into Step 1 and noted in `notes`.
PhysicalParams step1_params(const PhysicalParams& p, std::vector<std::string>* notes);

// "N1,N2" → {N1, N2}; throws ConfigError.
std::pair<int, int> parse_truncation(const std::string& text);
std::vector<double> parse_number_list(const std::string& text, const std::string& what);

}  // namespace tmsq::cli
