#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "survkit/dataset.hpp"
#include "survkit/validation.hpp"

namespace survkit {

struct ValidationConfig {
  bool run_ncv = true;
  bool run_mc = true;
  int outer_k = 3;
  int inner_k = 5;
  int n_experiments = 90;
  double train_fraction = 2.0 / 3.0;
};

struct ModelEntry {
  ModelSpec spec;
  // Fixed rsf parameters for the importance command; absent means tune first.
  std::optional<RsfParams> fixed_rsf;
};

// Full run configuration. The master seed is mandatory: there is no
// wall-clock default, so a config fully determines its outputs.
struct RunConfig {
  std::string input;
  SchemaConfig schema;
  int knn_k = 5;
  bool warn_impute_fallback = true;
  std::vector<ModelEntry> models;
  ValidationConfig validation;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  int jobs = 1;
};

// Parses and validates a JSON run configuration. Throws ConfigError on any
// unknown key, missing required key, or out-of-range value.
RunConfig load_run_config(const std::string& path);

// Content digest of the config file bytes (64-bit FNV-1a, hex), recorded in
// the run metadata so a bundle can be matched to the exact config that made it.
std::string config_digest(const std::string& path);

}  // namespace survkit
