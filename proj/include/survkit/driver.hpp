#pragma once

#include <optional>
#include <string>
#include <vector>

#include "survkit/config.hpp"
#include "survkit/report.hpp"
#include "survkit/synth.hpp"

namespace survkit {

// Command-line overrides applied on top of the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  std::optional<int> jobs;
  std::vector<std::string> models;  // subset filter; empty means all
};

// Loads, preprocesses, runs every configured protocol for every configured
// model, and writes the report bundle. Returns the bundle for in-process use.
ReportBundle cmd_run(const std::string& config_path, const RunOverrides& overrides = {});

// Fits a random survival forest on the full preprocessed dataset (with the
// config's fixed parameters, or tuned when none are fixed) and writes the
// ranked permutation importance.
ImportanceRanking cmd_importance(const std::string& config_path,
                                 const RunOverrides& overrides = {});

// Generates a synthetic cohort and writes it as a run-ready CSV.
void cmd_synth(const SynthSpec& spec, const std::string& out_path);

// Parses and validates a config; verifies referenced columns when the input
// file is readable. Returns a human-readable summary.
std::string check_config(const std::string& config_path);

}  // namespace survkit
