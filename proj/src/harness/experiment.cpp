#include "dikin/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include "dikin/diagnostics.hpp"
#include "dikin/errors.hpp"

namespace dikin::harness {

using nlohmann::json;

namespace {

constexpr double kOracleTolerance = 1e-6;

json truth_json(const GroundTruth &g) {
  return json{{"functional", g.functional_name},
              {"value", g.value},
              {"method", g.method}};
}

double functional_value(const std::string &name, const Vector &x) {
  if (name == "E_norm")
    return x.norm();
  if (name == "E_norm_sq")
    return x.squaredNorm();
  throw OracleUnavailable("no functional '" + name + "'");
}

} // namespace

std::string dump_json(const json &j) { return j.dump(2) + "\n"; }

int worker_count(int chains, int requested) {
  int n = requested;
  if (n <= 0) {
    if (const char *env = std::getenv("DIKIN_SAMPLER_THREADS")) {
      n = std::atoi(env);
    }
  }
  if (n <= 0)
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, std::min(n, chains));
}

std::filesystem::path trace_path(const std::filesystem::path &run_dir,
                                 const std::string &sampler, int chain) {
  char name[32];
  std::snprintf(name, sizeof(name), "chain_%03d.csv", chain);
  return run_dir / sampler / name;
}

// ---------------------------------------------------------------------------
// Ground truth

std::vector<GroundTruth> compute_ground_truth(const ExperimentConfig &config) {
  std::vector<GroundTruth> out;
  for (const auto &name : config.ground_truth) {
    GroundTruth primary;
    GroundTruth check;
    if (name == "E_norm") {
      if (config.domain.type != DomainSpec::Type::ball ||
          config.domain.radius != 1.0 || config.target.type != "standard_gaussian")
        throw OracleUnavailable("E_norm needs the standard Gaussian on the unit ball");
      const int d = static_cast<int>(config.dimension());
      primary = truncated_gaussian_ball_norm_expectation(d);
      check = truncated_gaussian_ball_norm_expectation_gamma(d);
    } else if (name == "E_norm_sq") {
      if (config.domain.type != DomainSpec::Type::box ||
          config.target.type != "gaussian_box")
        throw OracleUnavailable("E_norm_sq needs gaussian_box on a box");
      const auto p = box_gaussian_params(config.domain.bounds);
      primary = box_gaussian_norm_sq_expectation(p.bounds, p.mean, p.sigma);
      check = box_gaussian_norm_sq_expectation_closed_form(p.bounds, p.mean,
                                                           p.sigma);
    } else {
      throw OracleUnavailable("no oracle for functional '" + name + "'");
    }
    const double rel = std::abs(primary.value - check.value) /
                       std::max(std::abs(primary.value), 1e-300);
    if (rel > kOracleTolerance)
      throw OracleUnavailable("oracles for " + name + " disagree (relative " +
                              std::to_string(rel) + ")");
    out.push_back(primary);
  }
  return out;
}

json write_ground_truth(const ExperimentConfig &config) {
  json arr = json::array();
  for (const auto &name : config.ground_truth) {
    ExperimentConfig single = config;
    single.ground_truth = {name};
    const GroundTruth g = compute_ground_truth(single).front();
    GroundTruth check;
    if (name == "E_norm") {
      check = truncated_gaussian_ball_norm_expectation_gamma(
          static_cast<int>(config.dimension()));
    } else {
      const auto p = box_gaussian_params(config.domain.bounds);
      check = box_gaussian_norm_sq_expectation_closed_form(p.bounds, p.mean,
                                                           p.sigma);
    }
    json entry = truth_json(g);
    entry["cross_check"] = {{"method", check.method}, {"value", check.value}};
    entry["relative_difference"] =
        std::abs(g.value - check.value) / std::abs(g.value);
    entry["tolerance"] = kOracleTolerance;
    arr.push_back(entry);
  }
  json doc{{"experiment_id", config.id}, {"ground_truth", arr}};
  write_text_file(config.output_dir / "ground_truth.json", dump_json(doc));
  return doc;
}

// ---------------------------------------------------------------------------
// Tuning and chains

namespace {

std::uint64_t tuning_seed(const ExperimentConfig &config,
                          const std::string &sampler) {
  return chain_seed(config.master_seed, config.id + "/tune/" + sampler, 0);
}

} // namespace

std::vector<std::pair<std::string, TuneResult>>
tune_samplers(const ExperimentConfig &config) {
  const auto barrier = config.domain.build();
  const Target target = config.target.build(config.domain);
  std::vector<std::pair<std::string, TuneResult>> out;
  for (const auto &s : config.samplers) {
    if (!s.tune)
      continue;
    Rng rng(tuning_seed(config, s.name));
    out.emplace_back(s.name,
                     tune_step_size(*barrier, target, s.kernel,
                                    config.start_point(), s.target_acceptance,
                                    s.tune_iterations, rng));
  }
  return out;
}

void run_chain(const Barrier &barrier, const Target &target,
               const SamplerSpec &spec, const Vector &x0, std::uint64_t seed,
               ChainTrace &trace, ChainCounters &counters) {
  Rng rng(seed);
  ChainState state = make_chain_state(barrier, target, spec.kernel, x0);
  trace = ChainTrace{};
  trace.dimension = x0.size();
  counters = ChainCounters{};
  const auto rows = static_cast<std::size_t>(spec.iterations / spec.thin);
  trace.iter.reserve(rows);
  trace.accepted.reserve(rows);
  trace.step_size.reserve(rows);
  trace.positions.reserve(rows * static_cast<std::size_t>(x0.size()));

  for (std::int64_t it = 1; it <= spec.iterations; ++it) {
    const StepRecord rec = step(state, barrier, target, spec.kernel, rng);
    ++counters.steps;
    counters.accepted += rec.accepted ? 1 : 0;
    counters.boundary_clips += rec.boundary_clip ? 1 : 0;
    if (!barrier.contains(state.position))
      ++counters.infeasible_states;
    if (it % spec.thin == 0)
      trace.append(it, rec.accepted, rec.step_size_used, state.position);
  }
}

namespace {

json manifest_json(const ExperimentConfig &config,
                   const std::vector<GroundTruth> &truths,
                   const std::vector<SamplerRun> &runs) {
  json m;
  m["schema_version"] = kSchemaVersion;
  m["experiment_id"] = config.id;
  m["master_seed"] = config.master_seed;
  m["dimension"] = config.dimension();
  m["domain"] = config.domain.type_name();
  m["target"] = config.target.type;
  m["beta"] = config.target.beta;
  m["well_threshold"] =
      config.target.is_bimodal() ? json(config.target.well_threshold) : json(nullptr);
  m["ground_truth"] = truths.empty() ? json(nullptr) : truth_json(truths.front());
  json samplers = json::array();
  for (const auto &r : runs) {
    ChainCounters total;
    for (const auto &c : r.counters) {
      total.steps += c.steps;
      total.accepted += c.accepted;
      total.boundary_clips += c.boundary_clips;
      total.infeasible_states += c.infeasible_states;
    }
    json s;
    s["name"] = r.spec.name;
    s["kernel"] = to_string(r.spec.kernel.kind);
    s["h_max"] = r.spec.kernel.h_max;
    s["epsilon"] = r.spec.kernel.epsilon;
    s["randomize_step"] = r.spec.kernel.randomize_step;
    s["divergence_mode"] = to_string(r.spec.kernel.divergence_mode);
    s["tuned"] = r.tuning.has_value();
    s["tune_acceptance"] =
        r.tuning ? json(r.tuning->acceptance) : json(nullptr);
    s["chains"] = r.traces.size();
    s["iterations"] = r.spec.iterations;
    s["warmup"] = r.spec.warmup;
    s["thin"] = r.spec.thin;
    s["steps"] = total.steps;
    s["accepted"] = total.accepted;
    s["boundary_clips"] = total.boundary_clips;
    s["infeasible_states"] = total.infeasible_states;
    samplers.push_back(s);
  }
  m["samplers"] = samplers;
  return m;
}

void write_error_curve(const std::filesystem::path &path, const ErrorBand &band,
                       const std::vector<std::int64_t> &iters) {
  std::string out = "t,iter,median,p10,p90\n";
  for (std::size_t t = 0; t < band.median.size(); ++t) {
    out += std::to_string(t + 1) + "," + std::to_string(iters[t]) + "," +
           format_double(band.median[t]) + "," + format_double(band.p10[t]) +
           "," + format_double(band.p90[t]) + "\n";
  }
  write_text_file(path, out);
}

std::vector<std::vector<double>>
error_curves(const std::string &functional, double truth,
             const std::vector<ChainTrace> &traces) {
  std::vector<std::vector<double>> curves;
  for (const auto &tr : traces) {
    std::vector<double> values(tr.rows());
    for (std::size_t r = 0; r < tr.rows(); ++r)
      values[r] = functional_value(functional, tr.position(r));
    curves.push_back(rolling_mean_error(values, truth));
  }
  return curves;
}

} // namespace

RunResult run_experiment(const ExperimentConfig &config,
                         const RunOptions &options) {
  const auto barrier = config.domain.build();
  const Target target = config.target.build(config.domain);
  const std::vector<GroundTruth> truths = compute_ground_truth(config);
  const Vector x0 = config.start_point();

  RunResult result;
  for (const auto &spec : config.samplers) {
    const auto t0 = std::chrono::steady_clock::now();
    SamplerRun run;
    run.spec = spec;
    if (spec.tune) {
      Rng rng(tuning_seed(config, spec.name));
      run.tuning = tune_step_size(*barrier, target, spec.kernel, x0,
                                  spec.target_acceptance, spec.tune_iterations,
                                  rng);
      run.spec.kernel.h_max = run.tuning->h_max;
    }

    const int m = config.chains;
    run.traces.resize(static_cast<std::size_t>(m));
    run.counters.resize(static_cast<std::size_t>(m));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(m));
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int c = next.fetch_add(1); c < m; c = next.fetch_add(1)) {
        const auto idx = static_cast<std::size_t>(c);
        try {
          run_chain(*barrier, target, run.spec, x0,
                    chain_seed(config.master_seed, config.id,
                               static_cast<std::uint64_t>(c)),
                    run.traces[idx], run.counters[idx]);
        } catch (...) {
          errors[idx] = std::current_exception();
        }
      }
    };
    const int nthreads = worker_count(m, options.threads);
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t)
      pool.emplace_back(worker);
    worker();
    for (auto &th : pool)
      th.join();
    for (auto &e : errors)
      if (e)
        std::rethrow_exception(e);

    run.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    result.samplers.push_back(std::move(run));
  }

  result.manifest = manifest_json(config, truths, result.samplers);
  std::vector<std::vector<ChainTrace>> traces;
  for (const auto &r : result.samplers)
    traces.push_back(r.traces);
  result.summary = summarize(result.manifest, traces);

  if (options.persist) {
    const auto &dir = config.output_dir;
    write_text_file(dir / "manifest.json", dump_json(result.manifest));
    write_text_file(dir / "summary.json", dump_json(result.summary));
    json timing = json::object();
    for (const auto &r : result.samplers)
      timing[r.spec.name] = r.wall_seconds;
    write_text_file(dir / "timing.json", dump_json(timing));
    for (const auto &r : result.samplers) {
      for (std::size_t c = 0; c < r.traces.size(); ++c)
        write_trace_csv(trace_path(dir, r.spec.name, static_cast<int>(c)),
                        r.traces[c]);
      if (!truths.empty() && !r.traces.empty() && r.traces.front().rows() > 0) {
        const auto curves = error_curves(truths.front().functional_name,
                                         truths.front().value, r.traces);
        write_error_curve(dir / r.spec.name / "error_curve.csv",
                          aggregate_error_curves(curves), r.traces.front().iter);
      }
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Summaries

json summarize(const json &manifest,
               const std::vector<std::vector<ChainTrace>> &traces) {
  const auto &samplers = manifest.at("samplers");
  if (samplers.size() != traces.size())
    throw IoError("manifest lists " + std::to_string(samplers.size()) +
                  " samplers but traces for " + std::to_string(traces.size()));
  const auto d = manifest.at("dimension").get<Eigen::Index>();
  const json &truth = manifest.at("ground_truth");
  const json &threshold = manifest.at("well_threshold");

  json out;
  out["schema_version"] = kSchemaVersion;
  out["experiment_id"] = manifest.at("experiment_id");
  out["master_seed"] = manifest.at("master_seed");
  out["ground_truth"] = truth;
  json list = json::array();

  for (std::size_t k = 0; k < samplers.size(); ++k) {
    const json &meta = samplers[k];
    const auto &chains = traces[k];
    const auto warmup = meta.at("warmup").get<std::int64_t>();
    json s;
    for (const char *key : {"name", "kernel", "h_max", "tuned", "tune_acceptance",
                            "chains", "iterations", "warmup", "thin",
                            "boundary_clips", "infeasible_states"})
      s[key] = meta.at(key);
    const auto steps = meta.at("steps").get<std::int64_t>();
    s["acceptance_rate"] =
        steps > 0 ? meta.at("accepted").get<double>() / static_cast<double>(steps)
                  : 0.0;
    s["boundary_clip_rate"] =
        steps > 0
            ? meta.at("boundary_clips").get<double>() / static_cast<double>(steps)
            : 0.0;

    // Split-Rhat per dimension on post-warmup rows.
    std::size_t post = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> first(chains.size(), 0);
    for (std::size_t c = 0; c < chains.size(); ++c) {
      const auto &it = chains[c].iter;
      first[c] = static_cast<std::size_t>(
          std::upper_bound(it.begin(), it.end(), warmup) - it.begin());
      post = std::min(post, chains[c].rows() - first[c]);
    }
    if (chains.size() >= 2 && post >= 4) {
      json per_dim = json::array();
      std::vector<double> finite;
      for (Eigen::Index j = 0; j < d; ++j) {
        Matrix draws(static_cast<Eigen::Index>(chains.size()),
                     static_cast<Eigen::Index>(post));
        for (std::size_t c = 0; c < chains.size(); ++c)
          for (std::size_t i = 0; i < post; ++i)
            draws(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
                chains[c].positions[(first[c] + i) * static_cast<std::size_t>(d) +
                                    static_cast<std::size_t>(j)];
        try {
          const double r = split_rhat_rank_normalized(draws);
          per_dim.push_back(r);
          finite.push_back(r);
        } catch (const ZeroVariance &) {
          per_dim.push_back(nullptr);
        }
      }
      json rhat;
      rhat["draws_per_chain"] = post;
      rhat["per_dimension"] = per_dim;
      if (!finite.empty()) {
        rhat["median"] = percentile(finite, 0.5);
        rhat["p90"] = percentile(finite, 0.9);
        rhat["max"] = *std::max_element(finite.begin(), finite.end());
        rhat["frac_above_1_01"] =
            static_cast<double>(std::count_if(finite.begin(), finite.end(),
                                              [](double r) { return r > 1.01; })) /
            static_cast<double>(finite.size());
      }
      s["rhat"] = rhat;
    } else {
      s["rhat"] = nullptr;
    }

    if (!threshold.is_null()) {
      TransitionCount tc;
      tc.threshold = threshold.get<double>();
      for (const auto &tr : chains) {
        TransitionCounter counter(tc.threshold);
        for (std::size_t r = 0; r < tr.rows(); ++r)
          counter.observe(tr.position(r));
        tc.per_chain_counts.push_back(counter.transitions());
      }
      s["transitions"] = {{"per_chain", tc.per_chain_counts},
                          {"mean", tc.mean()},
                          {"zero_fraction", tc.zero_fraction()},
                          {"threshold", tc.threshold}};
    } else {
      s["transitions"] = nullptr;
    }

    if (!truth.is_null() && !chains.empty() && chains.front().rows() > 0) {
      const auto functional = truth.at("functional").get<std::string>();
      const double value = truth.at("value").get<double>();
      const auto curves = error_curves(functional, value, chains);
      std::vector<double> terminal;
      double pooled = 0.0;
      for (std::size_t c = 0; c < curves.size(); ++c) {
        terminal.push_back(curves[c].back());
        double sum = 0.0;
        for (std::size_t r = 0; r < chains[c].rows(); ++r)
          sum += functional_value(functional, chains[c].position(r));
        pooled += sum / static_cast<double>(chains[c].rows());
      }
      pooled /= static_cast<double>(curves.size());
      s["terminal_error"] = {
          {"per_chain", terminal},
          {"mean", std::accumulate(terminal.begin(), terminal.end(), 0.0) /
                       static_cast<double>(terminal.size())},
          {"median", percentile(terminal, 0.5)},
          {"pooled", std::abs(pooled - value)}};
    } else {
      s["terminal_error"] = nullptr;
    }
    list.push_back(s);
  }
  out["samplers"] = list;
  return out;
}

json diagnose(const std::filesystem::path &run_dir) {
  const json manifest = json::parse(read_text_file(run_dir / "manifest.json"));
  if (manifest.value("schema_version", 0) != kSchemaVersion)
    throw IoError(run_dir.string() + "/manifest.json: unsupported schema version");
  std::vector<std::vector<ChainTrace>> traces;
  for (const auto &s : manifest.at("samplers")) {
    const auto name = s.at("name").get<std::string>();
    const int m = s.at("chains").get<int>();
    std::vector<ChainTrace> chains;
    for (int c = 0; c < m; ++c)
      chains.push_back(read_trace_csv(trace_path(run_dir, name, c)));
    traces.push_back(std::move(chains));
  }
  return summarize(manifest, traces);
}

} // namespace dikin::harness
