// Command-line driver for the constrained-sampling experiments.
//
//   dikin_sampler run <config> [--seed S] [--chains M] [--iters N]
//                              [--time-horizon T] [--out DIR]
//   dikin_sampler truth <config>
//   dikin_sampler tune <config>
//   dikin_sampler diagnose <run-dir> [--out FILE]
//   dikin_sampler version
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "dikin/errors.hpp"
#include "dikin/harness/experiment.hpp"

namespace {

constexpr const char *kVersion = "dikin_sampler 1.0.0";

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::int64_t> iters;
  std::optional<double> time_horizon;
  std::optional<std::string> out;
};

void add_common(CLI::App *cmd, CommonFlags &flags) {
  cmd->add_option("config", flags.config, "Experiment config file")->required();
  cmd->add_option("--seed", flags.seed, "Override the master seed");
  cmd->add_option("--chains", flags.chains, "Override the number of chains");
  cmd->add_option("--iters", flags.iters,
                  "Override Metropolis iterations (warmup scales along)");
  cmd->add_option("--time-horizon", flags.time_horizon,
                  "Override integration time of unadjusted samplers");
  cmd->add_option("--out", flags.out, "Override the output directory");
}

dikin::harness::ExperimentConfig load(const CommonFlags &flags) {
  auto cfg = dikin::harness::load_config(flags.config);
  dikin::harness::Overrides o;
  o.seed = flags.seed;
  o.chains = flags.chains;
  o.iterations = flags.iters;
  o.time_horizon = flags.time_horizon;
  if (flags.out)
    o.output_dir = *flags.out;
  dikin::harness::apply_overrides(cfg, o);
  return cfg;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Interior-point Langevin samplers on constrained domains"};
  app.require_subcommand(1);

  CommonFlags run_flags, truth_flags, tune_flags;
  auto *run = app.add_subcommand("run", "Run an experiment and persist traces");
  add_common(run, run_flags);
  auto *truth = app.add_subcommand("truth", "Compute ground-truth functionals");
  add_common(truth, truth_flags);
  auto *tune = app.add_subcommand("tune", "Tune step sizes only");
  add_common(tune, tune_flags);

  std::string trace_dir;
  std::optional<std::string> diagnose_out;
  auto *diag = app.add_subcommand(
      "diagnose", "Recompute the run summary from persisted traces");
  diag->add_option("trace-dir", trace_dir, "Output directory of a run")
      ->required();
  diag->add_option("--out", diagnose_out, "Write the summary here");

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (app.got_subcommand("version")) {
      std::cout << kVersion << "\n";
      return kOk;
    }
    if (run->parsed()) {
      const auto cfg = load(run_flags);
      const auto result = dikin::harness::run_experiment(cfg);
      std::cout << dikin::harness::dump_json(result.summary);
      std::cerr << "wrote " << cfg.output_dir.string() << "\n";
      return kOk;
    }
    if (truth->parsed()) {
      const auto cfg = load(truth_flags);
      std::cout << dikin::harness::dump_json(
          dikin::harness::write_ground_truth(cfg));
      return kOk;
    }
    if (tune->parsed()) {
      const auto cfg = load(tune_flags);
      nlohmann::json j = nlohmann::json::object();
      for (const auto &[name, res] : dikin::harness::tune_samplers(cfg))
        j[name] = {{"h_max", res.h_max},
                   {"acceptance", res.acceptance},
                   {"iterations", res.iterations}};
      const std::string text = dikin::harness::dump_json(j);
      dikin::harness::write_text_file(cfg.output_dir / "tuning.json", text);
      std::cout << text;
      return kOk;
    }
    if (diag->parsed()) {
      const std::string text =
          dikin::harness::dump_json(dikin::harness::diagnose(trace_dir));
      if (diagnose_out)
        dikin::harness::write_text_file(*diagnose_out, text);
      else
        std::cout << text;
      return kOk;
    }
  } catch (const dikin::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const dikin::OracleUnavailable &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kRuntimeError;
}
