#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "dikin/linalg.hpp"

namespace dikin {

/// Rank-normalized split-Rhat of one scalar quantity. `draws` is
/// chains x iterations; needs at least 2 chains and 4 iterations. An odd
/// trailing draw is dropped before splitting.
///
///  1. split every chain into halves (2m chains of length n' = n/2),
///  2. rank all values jointly, ties get the average rank,
///  3. z = Phi^-1((rank - 3/8) / (N + 1/4)),
///  4. Rhat = sqrt(((n'-1)/n' W + B/n') / W) on z.
///
/// Throws ZeroVariance when W = 0.
double split_rhat_rank_normalized(const Matrix &draws);

/// Linear-interpolation percentile (q in [0, 1]) of an unsorted sample.
double percentile(std::vector<double> values, double q);

/// e_t = |t^-1 sum_{i<=t} v_i - truth| for t = 1..n, in one pass.
std::vector<double> rolling_mean_error(std::span<const double> values,
                                       double truth);

/// Pointwise median and 10th/90th percentiles of equally long curves.
struct ErrorBand {
  std::vector<double> median;
  std::vector<double> p10;
  std::vector<double> p90;
};

ErrorBand aggregate_error_curves(const std::vector<std::vector<double>> &curves);

enum class Well : std::uint8_t { neither, plus, minus };

/// plus if every coordinate > threshold, minus if every coordinate
/// < -threshold, neither otherwise.
Well classify_well(const Vector &x, double threshold);

/// Streaming inter-well transition counter. NEITHER draws are skipped; a
/// transition is a flip of the last definite well. The first definite well
/// only sets the baseline.
class TransitionCounter {
public:
  explicit TransitionCounter(double threshold = 1e-3) : threshold_(threshold) {}

  void observe(const Vector &x) { observe(classify_well(x, threshold_)); }
  void observe(Well w);

  std::int64_t transitions() const { return transitions_; }
  std::int64_t observed() const { return observed_; }

private:
  double threshold_;
  Well last_ = Well::neither;
  std::int64_t transitions_ = 0;
  std::int64_t observed_ = 0;
};

struct TransitionCount {
  std::vector<std::int64_t> per_chain_counts;
  double threshold = 1e-3;

  double mean() const;
  /// Fraction of chains with no transition.
  double zero_fraction() const;
};

/// One chain per entry, rows are draws (iterations x d).
TransitionCount count_well_transitions(const std::vector<Matrix> &chains,
                                       double threshold = 1e-3);

struct AcceptanceStats {
  double rate = 0.0;
  std::int64_t steps = 0;
  /// run length -> number of runs
  std::map<std::int64_t, std::int64_t> accept_bursts;
  std::map<std::int64_t, std::int64_t> reject_bursts;
};

AcceptanceStats acceptance_stats(std::span<const bool> accepted);

} // namespace dikin
