#include "dikin/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dikin/errors.hpp"

namespace dikin {

double split_rhat_rank_normalized(const Matrix &draws) {
  const Eigen::Index m = draws.rows();
  const Eigen::Index half = draws.cols() / 2;
  if (m < 2)
    throw DomainError("split-Rhat needs at least 2 chains");
  if (draws.cols() < 4)
    throw DomainError("split-Rhat needs at least 4 draws per chain");

  const Eigen::Index chains = 2 * m;
  const Eigen::Index total = chains * half;

  // Split chain k of the result is rows (k / 2), half (k % 2).
  auto value = [&](Eigen::Index k, Eigen::Index i) {
    return draws(k / 2, (k % 2) * half + i);
  };

  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto flat = [&](Eigen::Index idx) { return value(idx / half, idx % half); };
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return flat(a) < flat(b);
  });

  Matrix z(chains, half);
  const double denom = static_cast<double>(total) + 0.25;
  for (Eigen::Index start = 0; start < total;) {
    Eigen::Index end = start + 1;
    while (end < total && flat(order[end]) == flat(order[start]))
      ++end;
    // Ranks start..end-1 (0-based) share the average 1-based rank.
    const double rank = 0.5 * static_cast<double>(start + 1 + end);
    const double score = inverse_normal_cdf((rank - 0.375) / denom);
    for (Eigen::Index r = start; r < end; ++r)
      z(order[r] / half, order[r] % half) = score;
    start = end;
  }

  const double n = static_cast<double>(half);
  const Vector means = z.rowwise().mean();
  double within = 0.0;
  for (Eigen::Index k = 0; k < chains; ++k)
    within += (z.row(k).array() - means[k]).square().sum() / (n - 1.0);
  within /= static_cast<double>(chains);
  if (!(within > 0.0))
    throw ZeroVariance("split-Rhat: within-chain variance is zero");

  const double grand = means.mean();
  const double between =
      n * (means.array() - grand).square().sum() / static_cast<double>(chains - 1);
  const double var_plus = (n - 1.0) / n * within + between / n;
  return std::sqrt(var_plus / within);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty())
    throw DomainError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0))
    throw DomainError("percentile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

std::vector<double> rolling_mean_error(std::span<const double> values,
                                       double truth) {
  std::vector<double> out;
  out.reserve(values.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    sum += values[t];
    out.push_back(std::abs(sum / static_cast<double>(t + 1) - truth));
  }
  return out;
}

ErrorBand aggregate_error_curves(const std::vector<std::vector<double>> &curves) {
  ErrorBand band;
  if (curves.empty())
    return band;
  const std::size_t len = curves.front().size();
  for (const auto &c : curves)
    if (c.size() != len)
      throw DomainError("error curves must have equal length");
  band.median.resize(len);
  band.p10.resize(len);
  band.p90.resize(len);
  std::vector<double> column(curves.size());
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t r = 0; r < curves.size(); ++r)
      column[r] = curves[r][t];
    band.median[t] = percentile(column, 0.5);
    band.p10[t] = percentile(column, 0.1);
    band.p90[t] = percentile(column, 0.9);
  }
  return band;
}

Well classify_well(const Vector &x, double threshold) {
  if ((x.array() > threshold).all())
    return Well::plus;
  if ((x.array() < -threshold).all())
    return Well::minus;
  return Well::neither;
}

void TransitionCounter::observe(Well w) {
  ++observed_;
  if (w == Well::neither)
    return;
  if (last_ != Well::neither && w != last_)
    ++transitions_;
  last_ = w;
}

double TransitionCount::mean() const {
  if (per_chain_counts.empty())
    return 0.0;
  const double sum = std::accumulate(per_chain_counts.begin(),
                                     per_chain_counts.end(), 0.0);
  return sum / static_cast<double>(per_chain_counts.size());
}

double TransitionCount::zero_fraction() const {
  if (per_chain_counts.empty())
    return 0.0;
  const auto zeros =
      std::count(per_chain_counts.begin(), per_chain_counts.end(), 0);
  return static_cast<double>(zeros) /
         static_cast<double>(per_chain_counts.size());
}

TransitionCount count_well_transitions(const std::vector<Matrix> &chains,
                                       double threshold) {
  TransitionCount out;
  out.threshold = threshold;
  for (const auto &chain : chains) {
    TransitionCounter counter(threshold);
    for (Eigen::Index i = 0; i < chain.rows(); ++i)
      counter.observe(Vector(chain.row(i).transpose()));
    out.per_chain_counts.push_back(counter.transitions());
  }
  return out;
}

AcceptanceStats acceptance_stats(std::span<const bool> accepted) {
  AcceptanceStats s;
  s.steps = static_cast<std::int64_t>(accepted.size());
  if (accepted.empty())
    return s;
  std::int64_t n_acc = 0;
  std::int64_t run = 0;
  bool current = accepted.front();
  for (bool a : accepted) {
    n_acc += a ? 1 : 0;
    if (a == current) {
      ++run;
      continue;
    }
    (current ? s.accept_bursts : s.reject_bursts)[run] += 1;
    current = a;
    run = 1;
  }
  (current ? s.accept_bursts : s.reject_bursts)[run] += 1;
  s.rate = static_cast<double>(n_acc) / static_cast<double>(s.steps);
  return s;
}

} // namespace dikin
