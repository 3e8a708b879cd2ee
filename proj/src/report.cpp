#include "survkit/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "survkit/errors.hpp"

namespace survkit {

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double_field(const std::string& token) {
  if (token == "NA") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(token);
}

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline mangling
  if (!out) throw DataError("cannot write report file: " + path.string());
  return out;
}

void write_ncv_folds(std::ofstream& out, const std::string& model, const NCVReport& r) {
  for (const auto& f : r.folds) {
    out << model << ',' << f.fold << ',' << format_double(f.train_cindex) << ','
        << format_double(f.inner_cv_cindex) << ',' << format_double(f.test_cindex) << ','
        << params_to_string(f.chosen_params) << ',' << (f.failed ? 1 : 0) << '\n';
  }
}

void write_mc_experiments(std::ofstream& out, const std::string& model, const MCReport& r) {
  for (const auto& e : r.experiments) {
    out << model << ',' << e.experiment << ',' << e.seed << ','
        << format_double(e.train_cindex) << ',' << format_double(e.cv_cindex) << ','
        << format_double(e.test_cindex) << ',' << params_to_string(e.chosen_params) << ','
        << (e.failed ? 1 : 0) << '\n';
  }
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv_rows(const std::string& path,
                                                    const std::string& expected_header) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open report file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty report file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw DataError("unexpected header in " + path + ": " + line);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_csv_line(line));
  }
  return rows;
}

}  // namespace

void write_bundle(const std::string& out_dir, const ReportBundle& bundle, const RunMeta& meta) {
  const fs::path dir(out_dir);
  fs::create_directories(dir);

  bool any_ncv = false;
  bool any_mc = false;
  for (const auto& m : bundle.models) {
    any_ncv = any_ncv || m.ncv.has_value();
    any_mc = any_mc || m.mc.has_value();
  }

  if (any_ncv) {
    auto folds = open_out(dir / "ncv_folds.csv");
    folds << "model,fold,train_cindex,inner_cv_cindex,test_cindex,chosen_params,failed\n";
    auto summary = open_out(dir / "ncv_summary.csv");
    summary << "model,test_cindex,train_cindex,inner_cv_cindex\n";
    for (const auto& m : bundle.models) {
      if (!m.ncv) continue;
      write_ncv_folds(folds, m.model, *m.ncv);
      summary << m.model << ',' << format_double(m.ncv->mean_test) << ','
              << format_double(m.ncv->mean_train) << ',' << format_double(m.ncv->mean_inner)
              << '\n';
    }
  }

  if (any_mc) {
    auto experiments = open_out(dir / "mc_experiments.csv");
    experiments << "model,experiment,seed,train_cindex,cv_cindex,test_cindex,chosen_params,"
                   "failed\n";
    auto summary = open_out(dir / "mc_summary.csv");
    summary << "model,test_mean,test_sd,train_mean,train_sd,cv_mean,cv_sd,n_experiments,"
               "n_failed\n";
    for (const auto& m : bundle.models) {
      if (!m.mc) continue;
      write_mc_experiments(experiments, m.model, *m.mc);
      summary << m.model << ',' << format_double(m.mc->mean_test) << ','
              << format_double(m.mc->sd_test) << ',' << format_double(m.mc->mean_train) << ','
              << format_double(m.mc->sd_train) << ',' << format_double(m.mc->mean_cv) << ','
              << format_double(m.mc->sd_cv) << ',' << m.mc->experiments.size() << ','
              << m.mc->n_failed << '\n';
    }
  }

  if (bundle.importance) {
    auto out = open_out(dir / "importance.csv");
    out << "column,importance\n";
    for (const auto& e : bundle.importance->entries) {
      out << e.column << ',' << format_double(e.score) << '\n';
    }
  }

  // Written last: its presence marks the bundle complete. No timestamps, so
  // identical runs produce identical bundles byte for byte.
  nlohmann::json j;
  j["config_digest"] = meta.config_digest;
  j["seed"] = meta.seed;
  j["n_rows"] = meta.n_rows;
  j["n_columns"] = meta.n_columns;
  j["models"] = meta.models;
  j["protocols"] = meta.protocols;
  auto out = open_out(dir / "run_meta.json");
  out << j.dump(2) << '\n';
}

std::vector<NcvFoldRow> read_ncv_folds(const std::string& path) {
  const auto rows = read_csv_rows(
      path, "model,fold,train_cindex,inner_cv_cindex,test_cindex,chosen_params,failed");
  std::vector<NcvFoldRow> out;
  for (const auto& r : rows) {
    if (r.size() != 7) throw DataError("malformed row in " + path);
    NcvFoldRow row;
    row.model = r[0];
    row.fold = std::stoi(r[1]);
    row.train_cindex = parse_double_field(r[2]);
    row.inner_cv_cindex = parse_double_field(r[3]);
    row.test_cindex = parse_double_field(r[4]);
    row.chosen_params = r[5];
    row.failed = r[6] == "1";
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<NcvSummaryRow> read_ncv_summary(const std::string& path) {
  const auto rows = read_csv_rows(path, "model,test_cindex,train_cindex,inner_cv_cindex");
  std::vector<NcvSummaryRow> out;
  for (const auto& r : rows) {
    if (r.size() != 4) throw DataError("malformed row in " + path);
    out.push_back(NcvSummaryRow{r[0], parse_double_field(r[1]), parse_double_field(r[2]),
                                parse_double_field(r[3])});
  }
  return out;
}

std::vector<McExperimentRow> read_mc_experiments(const std::string& path) {
  const auto rows = read_csv_rows(
      path, "model,experiment,seed,train_cindex,cv_cindex,test_cindex,chosen_params,failed");
  std::vector<McExperimentRow> out;
  for (const auto& r : rows) {
    if (r.size() != 8) throw DataError("malformed row in " + path);
    McExperimentRow row;
    row.model = r[0];
    row.experiment = std::stoi(r[1]);
    row.seed = std::stoull(r[2]);
    row.train_cindex = parse_double_field(r[3]);
    row.cv_cindex = parse_double_field(r[4]);
    row.test_cindex = parse_double_field(r[5]);
    row.chosen_params = r[6];
    row.failed = r[7] == "1";
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<McSummaryRow> read_mc_summary(const std::string& path) {
  const auto rows = read_csv_rows(
      path, "model,test_mean,test_sd,train_mean,train_sd,cv_mean,cv_sd,n_experiments,n_failed");
  std::vector<McSummaryRow> out;
  for (const auto& r : rows) {
    if (r.size() != 9) throw DataError("malformed row in " + path);
    McSummaryRow row;
    row.model = r[0];
    row.test_mean = parse_double_field(r[1]);
    row.test_sd = parse_double_field(r[2]);
    row.train_mean = parse_double_field(r[3]);
    row.train_sd = parse_double_field(r[4]);
    row.cv_mean = parse_double_field(r[5]);
    row.cv_sd = parse_double_field(r[6]);
    row.n_experiments = std::stoi(r[7]);
    row.n_failed = std::stoi(r[8]);
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<ImportanceRow> read_importance(const std::string& path) {
  const auto rows = read_csv_rows(path, "column,importance");
  std::vector<ImportanceRow> out;
  for (const auto& r : rows) {
    if (r.size() != 2) throw DataError("malformed row in " + path);
    out.push_back(ImportanceRow{r[0], parse_double_field(r[1])});
  }
  return out;
}

}  // namespace survkit
