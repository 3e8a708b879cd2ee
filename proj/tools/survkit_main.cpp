// survkit command-line front end: synthetic cohort generation, config
// validation, and the full tune/validate protocol with report emission.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "survkit/driver.hpp"
#include "survkit/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitFitError = 4;

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const survkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const survkit::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const survkit::FitError& e) {
    std::cerr << "fit error: " << e.what() << '\n';
    return kExitFitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"survkit: survival model comparison on right-censored tabular data"};
  app.require_subcommand(1);

  std::string config_path;
  survkit::RunOverrides overrides;
  std::uint64_t seed_override = 0;
  bool seed_set = false;
  std::string out_override;
  int jobs_override = 0;
  std::vector<std::string> model_filter;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Path to the JSON run config")->required();
    cmd->add_option("--seed", seed_override, "Master seed override");
    cmd->add_option("--out", out_override, "Output directory override");
    cmd->add_option("--jobs", jobs_override, "Parallel task limit override");
    cmd->add_option("--models", model_filter, "Model subset filter (cox, coxnet, rsf)")
        ->delimiter(',');
  };

  CLI::App* run = app.add_subcommand("run", "Run the configured validation protocols");
  add_common(run);

  CLI::App* importance =
      app.add_subcommand("importance", "Rank variables by RSF permutation importance");
  add_common(importance);

  CLI::App* check = app.add_subcommand("check-config", "Validate a run config");
  check->add_option("--config", config_path, "Path to the JSON run config")->required();

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic cohort CSV");
  survkit::SynthSpec spec;
  std::string synth_out = "cohort.csv";
  std::vector<double> beta;
  synth->add_option("--n", spec.n, "Number of subjects")->required();
  synth->add_option("--p", spec.p, "Number of feature columns")->required();
  synth->add_option("--beta", beta,
                    "True coefficients (comma-separated; remaining entries are 0)")
      ->delimiter(',');
  synth->add_option("--shape", spec.weibull_shape, "Weibull baseline shape");
  synth->add_option("--scale", spec.weibull_scale, "Weibull baseline scale");
  synth->add_option("--censor-rate", spec.censor_rate_target, "Target censored fraction");
  synth->add_option("--missing-rate", spec.missing_rate, "Per-cell missingness probability");
  synth->add_option("--seed", spec.seed, "Generator seed")->required();
  synth->add_option("--out", synth_out, "Output CSV path");

  // --seed in the seed_override slot needs to know whether it was given.
  run->callback([&] { seed_set = run->count("--seed") > 0; });
  importance->callback([&] { seed_set = importance->count("--seed") > 0; });

  CLI11_PARSE(app, argc, argv);

  const auto fill_overrides = [&](CLI::App* cmd) {
    if (seed_set) overrides.seed = seed_override;
    if (cmd->count("--out")) overrides.output_dir = out_override;
    if (cmd->count("--jobs")) overrides.jobs = jobs_override;
    overrides.models = model_filter;
  };

  if (run->parsed()) {
    fill_overrides(run);
    return run_guarded([&] { survkit::cmd_run(config_path, overrides); });
  }
  if (importance->parsed()) {
    fill_overrides(importance);
    return run_guarded([&] { survkit::cmd_importance(config_path, overrides); });
  }
  if (check->parsed()) {
    return run_guarded([&] { std::cout << survkit::check_config(config_path); });
  }
  if (synth->parsed()) {
    return run_guarded([&] {
      spec.beta_true = Eigen::VectorXd::Zero(spec.p);
      if (static_cast<int>(beta.size()) > spec.p) {
        throw survkit::ConfigError("--beta lists more coefficients than --p");
      }
      for (std::size_t i = 0; i < beta.size(); ++i) {
        spec.beta_true(static_cast<Eigen::Index>(i)) = beta[i];
      }
      survkit::cmd_synth(spec, synth_out);
    });
  }
  return kExitOk;
}
