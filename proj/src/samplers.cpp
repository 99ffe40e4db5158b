#include "dikin/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dikin/errors.hpp"

namespace dikin {

std::string to_string(KernelKind kind) {
  switch (kind) {
  case KernelKind::unadjusted_dl:
    return "unadjusted_dl";
  case KernelKind::mdl:
    return "mdl";
  case KernelKind::drw:
    return "drw";
  case KernelKind::mala:
    return "mala";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string &name) {
  if (name == "unadjusted_dl")
    return KernelKind::unadjusted_dl;
  if (name == "mdl")
    return KernelKind::mdl;
  if (name == "drw")
    return KernelKind::drw;
  if (name == "mala")
    return KernelKind::mala;
  throw ConfigError("unknown kernel '" + name +
                    "' (expected unadjusted_dl, mdl, drw or mala)");
}

void KernelConfig::validate() const {
  if (!(h_max > 0.0) || !std::isfinite(h_max))
    throw ConfigError("h_max must be positive and finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ConfigError("epsilon must be non-negative and finite");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("beta must be positive and finite");
  if (kind == KernelKind::unadjusted_dl) {
    if (divergence_mode == DivergenceMode::none)
      throw ConfigError("unadjusted_dl needs a divergence mode other than none");
    if (randomize_step)
      throw ConfigError("unadjusted_dl is a time-stepping scheme; "
                        "randomize_step must be off");
  }
}

MetricState kernel_metric(const Barrier &barrier, const KernelConfig &config,
                          const Vector &x) {
  if (config.kind == KernelKind::mala)
    return identity_metric(x);
  return metric_state(barrier, x, config.epsilon);
}

ChainState make_chain_state(const Barrier &barrier, const Target &target,
                            const KernelConfig &config, const Vector &x) {
  if (x.size() != barrier.dimension() || x.size() != target.dimension())
    throw DomainError("initial point has wrong dimension");
  if (!barrier.contains(x))
    throw NotInterior("initial point is not strictly interior");
  ChainState s;
  s.position = x;
  s.metric = kernel_metric(barrier, config, x);
  s.potential = target.potential(x);
  s.gradient = target.gradient(x);
  return s;
}

// ---------------------------------------------------------------------------
// Unadjusted Dikin-Langevin

StepRecord step_unadjusted_dl(ChainState &state, const Barrier &barrier,
                              const Target &target, const KernelConfig &config,
                              Rng &rng) {
  if (!barrier.contains(state.position))
    throw NotInterior("step_unadjusted_dl: state is not interior");
  const double dt = config.h_max;
  const double beta = target.beta();
  const auto &c = state.metric.covariance;

  const Vector div = divergence_of_covariance(barrier, state.position,
                                              config.epsilon,
                                              config.divergence_mode);
  const Vector z = standard_normal_vector(state.position.size(), rng);
  const Vector lz = state.metric.chol_factor.triangularView<Eigen::Lower>() * z;
  Vector next = state.position - dt * (c * state.gradient) +
                (beta * dt) * div + std::sqrt(2.0 * beta * dt) * lz;

  StepRecord rec;
  rec.kernel = KernelKind::unadjusted_dl;
  rec.step_size_used = dt;
  rec.proposed = next;
  if (!barrier.contains(next)) {
    rec.accepted = false;
    rec.boundary_clip = true;
    rec.log_accept_ratio = -std::numeric_limits<double>::infinity();
    return rec;
  }
  state.metric = metric_state(barrier, next, config.epsilon);
  state.potential = target.potential(next);
  state.gradient = target.gradient(next);
  state.position = std::move(next);
  rec.accepted = true;
  rec.log_accept_ratio = 0.0;
  return rec;
}

// ---------------------------------------------------------------------------
// Metropolis-adjusted kernels

namespace {

Vector proposal_mean(const ChainState &state, const Target &target, double h,
                     KernelKind kind) {
  if (kind == KernelKind::drw)
    return state.position;
  return state.position -
         h * (state.metric.covariance * (state.gradient / target.beta()));
}

Proposal draw_proposal(const ChainState &state, Vector mean, double h,
                       Rng &rng) {
  const GaussianProposalParams params{std::move(mean), 2.0 * h, state.metric};
  Proposal p;
  p.step_size = h;
  p.candidate = sample_gaussian(params, rng);
  p.forward_log_density = log_gaussian_density(p.candidate, params);
  return p;
}

double draw_step_size(const KernelConfig &config, Rng &rng) {
  if (!config.randomize_step)
    return config.h_max;
  return rng.uniform(0.0, config.h_max);
}

StepRecord mh_step(ChainState &state, const Barrier &barrier,
                   const Target &target, KernelConfig config, KernelKind kind,
                   Rng &rng) {
  config.kind = kind;
  const double h = draw_step_size(config, rng);
  const Proposal p =
      kind == KernelKind::drw ? propose_drw(state, h, rng)
                              : propose_mdl(state, target, h, rng);
  return accept_mdl(state, p, barrier, target, config, rng);
}

} // namespace

Proposal propose_mdl(const ChainState &state, const Target &target, double h,
                     Rng &rng) {
  return draw_proposal(state,
                       proposal_mean(state, target, h, KernelKind::mdl), h,
                       rng);
}

Proposal propose_drw(const ChainState &state, double h, Rng &rng) {
  return draw_proposal(state, state.position, h, rng);
}

double proposal_log_density(const ChainState &from, const Vector &to,
                            const Target &target, double h, KernelKind kind) {
  const GaussianProposalParams params{proposal_mean(from, target, h, kind),
                                      2.0 * h, from.metric};
  return log_gaussian_density(to, params);
}

double log_acceptance_ratio(const ChainState &from, const ChainState &to,
                            const Target &target, double h, KernelKind kind) {
  return (from.potential - to.potential) / target.beta() +
         proposal_log_density(to, from.position, target, h, kind) -
         proposal_log_density(from, to.position, target, h, kind);
}

StepRecord accept_mdl(ChainState &state, const Proposal &proposal,
                      const Barrier &barrier, const Target &target,
                      const KernelConfig &config, Rng &rng) {
  StepRecord rec;
  rec.kernel = config.kind;
  rec.proposed = proposal.candidate;
  rec.step_size_used = proposal.step_size;

  const double u = rng.uniform();
  if (!barrier.contains(proposal.candidate)) {
    rec.accepted = false;
    rec.log_accept_ratio = -std::numeric_limits<double>::infinity();
    return rec;
  }

  ChainState candidate;
  candidate.position = proposal.candidate;
  candidate.metric = kernel_metric(barrier, config, proposal.candidate);
  candidate.potential = target.potential(proposal.candidate);
  candidate.gradient = target.gradient(proposal.candidate);

  const double h = proposal.step_size;
  const double log_a =
      (state.potential - candidate.potential) / target.beta() +
      proposal_log_density(candidate, state.position, target, h, config.kind) -
      proposal.forward_log_density;
  rec.log_accept_ratio = std::min(0.0, log_a);
  rec.accepted = std::log(u) < rec.log_accept_ratio;
  if (rec.accepted)
    state = std::move(candidate);
  return rec;
}

StepRecord step_mdl(ChainState &state, const Barrier &barrier,
                    const Target &target, const KernelConfig &config,
                    Rng &rng) {
  return mh_step(state, barrier, target, config, KernelKind::mdl, rng);
}

StepRecord step_drw(ChainState &state, const Barrier &barrier,
                    const Target &target, const KernelConfig &config,
                    Rng &rng) {
  return mh_step(state, barrier, target, config, KernelKind::drw, rng);
}

StepRecord step_mala(ChainState &state, const Barrier &domain,
                     const Target &target, const KernelConfig &config,
                     Rng &rng) {
  return mh_step(state, domain, target, config, KernelKind::mala, rng);
}

StepRecord step(ChainState &state, const Barrier &barrier,
                const Target &target, const KernelConfig &config, Rng &rng) {
  switch (config.kind) {
  case KernelKind::unadjusted_dl:
    return step_unadjusted_dl(state, barrier, target, config, rng);
  case KernelKind::mdl:
    return step_mdl(state, barrier, target, config, rng);
  case KernelKind::drw:
    return step_drw(state, barrier, target, config, rng);
  case KernelKind::mala:
    return step_mala(state, barrier, target, config, rng);
  }
  throw ConfigError("unknown kernel");
}

// ---------------------------------------------------------------------------
// Step-size tuning

TuneResult tune_step_size(const Barrier &barrier, const Target &target,
                          const KernelConfig &config, const Vector &x0,
                          double target_acceptance, int warmup_iters,
                          Rng &rng) {
  if (config.kind == KernelKind::unadjusted_dl)
    throw ConfigError("step-size tuning applies to Metropolis kernels only");
  if (warmup_iters < 1000)
    throw ConfigError("tuning needs at least 1000 warmup iterations");
  if (!(target_acceptance > 0.0 && target_acceptance <= 1.0))
    throw ConfigError("target acceptance must lie in (0, 1]");

  constexpr int batch = 50;
  KernelConfig cfg = config;
  cfg.validate();
  ChainState state = make_chain_state(barrier, target, cfg, x0);

  auto run_batch = [&](int n) {
    int accepted = 0;
    for (int i = 0; i < n; ++i)
      accepted += step(state, barrier, target, cfg, rng).accepted ? 1 : 0;
    return static_cast<double>(accepted) / n;
  };

  // Coarse phase: moves of a factor 3, halved in log space whenever the
  // direction flips. The harmonic gain below cannot travel orders of
  // magnitude on its own.
  int used = 0;
  const int coarse_budget = warmup_iters / 4;
  double log_step = std::log(3.0);
  int last_dir = 0;
  while (used + batch <= coarse_budget && log_step > std::log(3.0) / 16.0) {
    const double rate = run_batch(batch);
    used += batch;
    const int dir = rate > target_acceptance ? 1 : -1;
    if (last_dir != 0 && dir != last_dir)
      log_step /= 2.0;
    last_dir = dir;
    cfg.h_max *= std::exp(dir * log_step);
  }

  const int tail_start = warmup_iters - warmup_iters / 4;
  int tail_steps = 0;
  int tail_accepted = 0;
  double log_h = std::log(cfg.h_max);
  for (int t = batch; used < warmup_iters; t += batch) {
    const int n = std::min(batch, warmup_iters - used);
    int accepted = 0;
    for (int i = 0; i < n; ++i) {
      const bool acc = step(state, barrier, target, cfg, rng).accepted;
      accepted += acc ? 1 : 0;
      if (used + i >= tail_start) {
        ++tail_steps;
        tail_accepted += acc ? 1 : 0;
      }
    }
    used += n;
    const double rate = static_cast<double>(accepted) / n;
    const double gamma = 0.5 / std::ceil(static_cast<double>(t) / batch);
    log_h += gamma * (rate - target_acceptance);
    cfg.h_max = std::exp(log_h);
  }

  TuneResult res;
  res.h_max = cfg.h_max;
  res.iterations = used;
  res.acceptance =
      tail_steps > 0 ? static_cast<double>(tail_accepted) / tail_steps : 0.0;
  if (res.acceptance < 0.3 || res.acceptance > 0.9)
    throw TuningFailed("acceptance " + std::to_string(res.acceptance) +
                       " outside [0.3, 0.9] after " + std::to_string(used) +
                       " warmup iterations (h_max = " +
                       std::to_string(res.h_max) + ")");
  return res;
}

} // namespace dikin
