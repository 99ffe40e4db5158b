#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "dikin/harness/config.hpp"
#include "dikin/harness/trace_io.hpp"

namespace dikin::harness {

inline constexpr int kSchemaVersion = 1;

/// Per-chain totals over every step, including unrecorded ones.
struct ChainCounters {
  std::int64_t steps = 0;
  std::int64_t accepted = 0;
  std::int64_t boundary_clips = 0;
  std::int64_t infeasible_states = 0;
};

struct SamplerRun {
  SamplerSpec spec; // h_max is the frozen (possibly tuned) value
  std::optional<TuneResult> tuning;
  std::vector<ChainTrace> traces;
  std::vector<ChainCounters> counters;
  double wall_seconds = 0.0;
};

struct RunResult {
  nlohmann::json manifest;
  nlohmann::json summary;
  std::vector<SamplerRun> samplers;
};

struct RunOptions {
  bool persist = true;
  /// 0: DIKIN_SAMPLER_THREADS if set, else hardware concurrency.
  int threads = 0;
};

/// Ground truths for every functional the config requests, each verified
/// against its second oracle.
std::vector<GroundTruth> compute_ground_truth(const ExperimentConfig &config);

/// JSON record of `compute_ground_truth`, also written to
/// <output_dir>/ground_truth.json.
nlohmann::json write_ground_truth(const ExperimentConfig &config);

/// Tuned h_max for every sampler with tune = true, in config order.
std::vector<std::pair<std::string, TuneResult>>
tune_samplers(const ExperimentConfig &config);

/// Runs one chain of a sampler to completion.
void run_chain(const Barrier &barrier, const Target &target,
               const SamplerSpec &spec, const Vector &x0, std::uint64_t seed,
               ChainTrace &trace, ChainCounters &counters);

/// Tuning, m chains per sampler on a worker pool, persistence of
/// manifest.json, summary.json, timing.json, error curves and per-chain
/// CSV traces under config.output_dir.
RunResult run_experiment(const ExperimentConfig &config,
                         const RunOptions &options = {});

/// Diagnostics recomputed from recorded traces plus the run manifest.
nlohmann::json summarize(const nlohmann::json &manifest,
                         const std::vector<std::vector<ChainTrace>> &traces);

/// Reads manifest.json and every chain CSV under `run_dir` and returns the
/// same summary `run_experiment` wrote.
nlohmann::json diagnose(const std::filesystem::path &run_dir);

/// The stable on-disk serialization of summaries and manifests.
std::string dump_json(const nlohmann::json &j);

int worker_count(int chains, int requested = 0);

std::filesystem::path trace_path(const std::filesystem::path &run_dir,
                                 const std::string &sampler, int chain);

} // namespace dikin::harness
