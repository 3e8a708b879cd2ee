#include "survkit/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "survkit/errors.hpp"

namespace survkit {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

ModelSpec parse_coxnet(const json& obj) {
  check_keys(obj, "models.coxnet", {"alphas", "lambdas"});
  ModelSpec spec;
  spec.kind = ModelKind::coxnet;
  if (obj.contains("alphas")) {
    spec.coxnet_grid.alphas = obj.at("alphas").get<std::vector<double>>();
  }
  if (obj.contains("lambdas")) {
    spec.coxnet_grid.lambdas = obj.at("lambdas").get<std::vector<double>>();
  }
  if (spec.coxnet_grid.alphas.empty() || spec.coxnet_grid.lambdas.empty()) {
    throw ConfigError("coxnet grid must list at least one alpha and one lambda");
  }
  for (const double a : spec.coxnet_grid.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("coxnet alpha must lie in [0, 1]");
  }
  for (const double l : spec.coxnet_grid.lambdas) {
    if (!(l > 0.0)) throw ConfigError("coxnet lambda must be positive");
  }
  return spec;
}

ModelEntry parse_rsf(const json& obj) {
  check_keys(obj, "models.rsf",
             {"n_trees", "mtry_values", "min_node_sizes", "importance_repeats", "fixed"});
  ModelEntry entry;
  entry.spec.kind = ModelKind::rsf;
  entry.spec.n_trees = get_or(obj, "n_trees", 500);
  if (entry.spec.n_trees < 1) throw ConfigError("rsf n_trees must be >= 1");
  entry.spec.importance_repeats = get_or(obj, "importance_repeats", 5);
  if (entry.spec.importance_repeats < 1) {
    throw ConfigError("rsf importance_repeats must be >= 1");
  }
  if (obj.contains("mtry_values") != obj.contains("min_node_sizes")) {
    throw ConfigError("rsf grid overrides need both mtry_values and min_node_sizes");
  }
  if (obj.contains("mtry_values")) {
    RsfGridSpec grid;
    grid.mtry_values = obj.at("mtry_values").get<std::vector<int>>();
    grid.min_node_sizes = obj.at("min_node_sizes").get<std::vector<int>>();
    if (grid.mtry_values.empty() || grid.min_node_sizes.empty()) {
      throw ConfigError("rsf grid overrides must be non-empty");
    }
    entry.spec.rsf_grid_override = std::move(grid);
  }
  if (obj.contains("fixed")) {
    const json& fixed = obj.at("fixed");
    check_keys(fixed, "models.rsf.fixed", {"mtry", "min_node_size"});
    RsfParams params;
    params.mtry = get_or(fixed, "mtry", 0);
    params.min_node_size = get_or(fixed, "min_node_size", 0);
    if (params.mtry < 1 || params.min_node_size < 1) {
      throw ConfigError("rsf fixed parameters must be >= 1");
    }
    entry.fixed_rsf = params;
  }
  return entry;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const json j = parse_file(path);
  check_keys(j, "config",
             {"input", "schema", "preprocessing", "models", "validation", "seed", "output_dir",
              "jobs"});

  RunConfig config;
  if (!j.contains("input")) throw ConfigError("config requires 'input'");
  config.input = j.at("input").get<std::string>();
  if (!j.contains("seed")) {
    throw ConfigError("config requires 'seed' (runs never default to wall-clock seeds)");
  }
  config.seed = j.at("seed").get<std::uint64_t>();
  config.output_dir = get_or<std::string>(j, "output_dir", "out");
  config.jobs = get_or(j, "jobs", 1);
  if (config.jobs < 1) throw ConfigError("jobs must be >= 1");

  if (j.contains("schema")) {
    const json& s = j.at("schema");
    check_keys(s, "schema", {"time_column", "event_column", "exclude_features", "na_synonyms"});
    config.schema.time_column = get_or<std::string>(s, "time_column", "time");
    config.schema.event_column = get_or<std::string>(s, "event_column", "event");
    config.schema.exclude_features =
        get_or(s, "exclude_features", std::vector<std::string>{});
    if (s.contains("na_synonyms")) {
      config.schema.na_synonyms = s.at("na_synonyms").get<std::vector<std::string>>();
      if (config.schema.na_synonyms.empty()) {
        throw ConfigError("na_synonyms must be non-empty");
      }
    }
  }

  if (j.contains("preprocessing")) {
    const json& p = j.at("preprocessing");
    check_keys(p, "preprocessing",
               {"missingness_threshold", "keep_orphan_indicators", "knn_k",
                "warn_impute_fallback"});
    config.schema.missingness_threshold = get_or(p, "missingness_threshold", 0.51);
    if (!(config.schema.missingness_threshold > 0.0 &&
          config.schema.missingness_threshold <= 1.0)) {
      throw ConfigError("missingness_threshold must lie in (0, 1]");
    }
    config.schema.keep_orphan_indicators = get_or(p, "keep_orphan_indicators", false);
    config.knn_k = get_or(p, "knn_k", 5);
    if (config.knn_k < 1) throw ConfigError("knn_k must be >= 1");
    config.warn_impute_fallback = get_or(p, "warn_impute_fallback", true);
  }

  if (!j.contains("models") || j.at("models").empty()) {
    throw ConfigError("config requires at least one model under 'models'");
  }
  const json& models = j.at("models");
  check_keys(models, "models", {"cox", "coxnet", "rsf"});
  // Canonical report order regardless of config key order.
  if (models.contains("cox")) {
    check_keys(models.at("cox"), "models.cox", {});
    ModelEntry entry;
    entry.spec.kind = ModelKind::cox;
    config.models.push_back(std::move(entry));
  }
  if (models.contains("coxnet")) {
    ModelEntry entry;
    entry.spec = parse_coxnet(models.at("coxnet"));
    config.models.push_back(std::move(entry));
  }
  if (models.contains("rsf")) {
    config.models.push_back(parse_rsf(models.at("rsf")));
  }

  if (j.contains("validation")) {
    const json& v = j.at("validation");
    check_keys(v, "validation",
               {"protocols", "outer_k", "inner_k", "n_experiments", "train_fraction"});
    if (v.contains("protocols")) {
      const auto protocols = v.at("protocols").get<std::vector<std::string>>();
      config.validation.run_ncv = false;
      config.validation.run_mc = false;
      for (const auto& p : protocols) {
        if (p == "ncv") {
          config.validation.run_ncv = true;
        } else if (p == "mc") {
          config.validation.run_mc = true;
        } else {
          throw ConfigError("unknown protocol '" + p + "' (expected 'ncv' or 'mc')");
        }
      }
    }
    config.validation.outer_k = get_or(v, "outer_k", 3);
    config.validation.inner_k = get_or(v, "inner_k", 5);
    config.validation.n_experiments = get_or(v, "n_experiments", 90);
    config.validation.train_fraction = get_or(v, "train_fraction", 2.0 / 3.0);
    if (config.validation.outer_k < 2) throw ConfigError("outer_k must be >= 2");
    if (config.validation.inner_k < 2) throw ConfigError("inner_k must be >= 2");
    if (config.validation.n_experiments < 1) throw ConfigError("n_experiments must be >= 1");
    if (!(config.validation.train_fraction > 0.0 && config.validation.train_fraction < 1.0)) {
      throw ConfigError("train_fraction must lie in (0, 1)");
    }
  }
  return config;
}

std::string config_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char c;
  while (in.get(c)) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

}  // namespace survkit
