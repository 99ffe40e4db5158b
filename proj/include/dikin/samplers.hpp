#pragma once

#include <string>

#include "dikin/geometry.hpp"
#include "dikin/rng.hpp"
#include "dikin/targets.hpp"

namespace dikin {

enum class KernelKind { unadjusted_dl, mdl, drw, mala };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string &name);

/// Per-sampler settings. For unadjusted_dl, h_max is the Euler-Maruyama time
/// step dt and is never randomized.
struct KernelConfig {
  KernelKind kind = KernelKind::mdl;
  double h_max = 0.1;
  double epsilon = 1e-5;
  double beta = 1.0;
  bool randomize_step = true;
  DivergenceMode divergence_mode = DivergenceMode::finite_difference;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// Current position with everything the kernels need at it. All cached
/// fields correspond to `position`; the potential is the untempered f.
struct ChainState {
  Vector position;
  MetricState metric;
  double potential = 0.0;
  Vector gradient;
};

struct StepRecord {
  Vector proposed;
  bool accepted = false;
  /// Unadjusted kernel only: the Euler-Maruyama update left the domain and
  /// the state was repeated.
  bool boundary_clip = false;
  double step_size_used = 0.0;
  /// min(0, log A); -inf for candidates outside the domain.
  double log_accept_ratio = 0.0;
  KernelKind kernel = KernelKind::mdl;
};

struct Proposal {
  Vector candidate;
  double step_size = 0.0;
  double forward_log_density = 0.0;
};

/// Metric the kernel uses at x: identity for MALA, C_eps otherwise.
MetricState kernel_metric(const Barrier &barrier, const KernelConfig &config,
                          const Vector &x);

/// Throws NotInterior unless x is strictly inside the barrier's domain.
ChainState make_chain_state(const Barrier &barrier, const Target &target,
                            const KernelConfig &config, const Vector &x);

/// Euler-Maruyama step of
///   dX = -C grad f dt + beta div C dt + sqrt(2 beta C) dW
/// with dt = config.h_max. Updates that leave the domain are dropped and
/// reported as boundary clips.
StepRecord step_unadjusted_dl(ChainState &state, const Barrier &barrier,
                              const Target &target, const KernelConfig &config,
                              Rng &rng);

/// Candidate from N(x - h C grad(f / beta), 2h C) using the cached factor.
Proposal propose_mdl(const ChainState &state, const Target &target, double h,
                     Rng &rng);

/// Candidate from N(x, 2h C): the drift-free Dikin proposal.
Proposal propose_drw(const ChainState &state, double h, Rng &rng);

/// Log proposal density q_h(to | from) for the given kernel.
double proposal_log_density(const ChainState &from, const Vector &to,
                            const Target &target, double h, KernelKind kind);

/// Unclamped log Metropolis-Hastings ratio for moving `from` -> `to` with
/// the shared step size h.
double log_acceptance_ratio(const ChainState &from, const ChainState &to,
                            const Target &target, double h, KernelKind kind);

/// Metropolis-Hastings accept/reject of `proposal`. One uniform is always
/// consumed so that streams stay aligned across kernels. On acceptance the
/// candidate's metric becomes the new cache.
StepRecord accept_mdl(ChainState &state, const Proposal &proposal,
                      const Barrier &barrier, const Target &target,
                      const KernelConfig &config, Rng &rng);

/// h ~ Unif(0, h_max) (or h_max when not randomized), then propose/accept.
StepRecord step_mdl(ChainState &state, const Barrier &barrier,
                    const Target &target, const KernelConfig &config, Rng &rng);

StepRecord step_drw(ChainState &state, const Barrier &barrier,
                    const Target &target, const KernelConfig &config, Rng &rng);

/// MDL with the identity metric; `domain` only supplies the indicator.
StepRecord step_mala(ChainState &state, const Barrier &domain,
                     const Target &target, const KernelConfig &config,
                     Rng &rng);

/// Dispatch on config.kind.
StepRecord step(ChainState &state, const Barrier &barrier,
                const Target &target, const KernelConfig &config, Rng &rng);

struct TuneResult {
  double h_max = 0.0;
  /// Acceptance over the last quarter of the warmup.
  double acceptance = 0.0;
  int iterations = 0;
};

/// Robbins-Monro on log h_max in batches of 50 steps,
///   log h <- log h + gamma_t (acc_batch - target),  gamma_t = 0.5 / ceil(t/50),
/// preceded by a coarse bracketing phase of at most a quarter of the warmup
/// that moves h by factors of 3 until a batch lands within 0.2 of the target.
/// Starts from config.h_max. Throws TuningFailed if the final acceptance is
/// outside [0.3, 0.9].
TuneResult tune_step_size(const Barrier &barrier, const Target &target,
                          const KernelConfig &config, const Vector &x0,
                          double target_acceptance, int warmup_iters,
                          Rng &rng);

} // namespace dikin
