#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dikin/geometry.hpp"
#include "dikin/samplers.hpp"
#include "dikin/targets.hpp"

namespace dikin::harness {

struct DomainSpec {
  enum class Type { box, polytope, ball };
  Type type = Type::box;
  Vector bounds;           // box
  Matrix rows;             // polytope
  Vector interior_point;   // polytope; origin when empty
  Eigen::Index dimension = 0;
  double radius = 1.0;     // ball

  std::unique_ptr<Barrier> build() const;
  std::string type_name() const;
};

struct TargetSpec {
  std::string type = "standard_gaussian";
  double beta = 1.0;
  double offset = 0.5;    // bimodal
  double stiffness = 3.0; // bimodal
  double well_threshold = 1e-3;

  Target build(const DomainSpec &domain) const;
  bool is_bimodal() const { return type == "bimodal"; }
};

struct SamplerSpec {
  std::string name;
  KernelConfig kernel;
  bool tune = false;
  double target_acceptance = 0.6;
  int tune_iterations = 5000;
  std::int64_t iterations = 0;
  std::int64_t warmup = 0;
  std::int64_t thin = 1;
  /// Keys given explicitly in the sampler section.
  bool explicit_iterations = false;
  bool explicit_warmup = false;
  bool explicit_thin = false;
};

struct ExperimentConfig {
  std::string id;
  int chains = 4;
  std::int64_t iterations = 1000;
  std::int64_t warmup = 0;
  std::int64_t thin = 1;
  /// Integration time for unadjusted samplers (0: use `iterations`).
  double time_horizon = 0.0;
  /// Integration time between recorded samples of unadjusted samplers.
  double record_interval = 0.0;
  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir;
  Vector initial_point; // empty means origin
  std::vector<std::string> ground_truth;
  DomainSpec domain;
  TargetSpec target;
  std::vector<SamplerSpec> samplers;

  Eigen::Index dimension() const;
  Vector start_point() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> chains;
  std::optional<std::int64_t> iterations;
  std::optional<double> time_horizon;
  std::optional<std::filesystem::path> output_dir;
};

/// Parses the key = value / [section] format. Throws ConfigError with the
/// offending line on schema violations.
ExperimentConfig parse_config_text(const std::string &text,
                                   const std::string &source = "<string>");

/// Throws ConfigError naming the path if it cannot be read.
ExperimentConfig load_config(const std::filesystem::path &path);

/// Applies overrides and re-derives per-sampler iterations, warmup and thin.
void apply_overrides(ExperimentConfig &config, const Overrides &overrides);

/// Fills per-sampler iteration counts from experiment defaults and checks
/// every invariant (warmup < iterations, thin >= 1, ...).
void resolve(ExperimentConfig &config);

} // namespace dikin::harness
