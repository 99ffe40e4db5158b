#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "dikin/diagnostics.hpp"
#include "dikin/errors.hpp"
#include "support.hpp"

using namespace dikin;

namespace {

// Straightforward transcription: explicit split, O(N^2) average ranks,
// textbook between/within variances.
double naive_rhat(const Matrix &draws) {
  const int m = static_cast<int>(draws.rows());
  const int half = static_cast<int>(draws.cols()) / 2;
  std::vector<std::vector<double>> chains;
  for (int c = 0; c < m; ++c) {
    std::vector<double> a, b;
    for (int i = 0; i < half; ++i) {
      a.push_back(draws(c, i));
      b.push_back(draws(c, half + i));
    }
    chains.push_back(a);
    chains.push_back(b);
  }
  std::vector<double> all;
  for (auto &ch : chains)
    all.insert(all.end(), ch.begin(), ch.end());
  const double n_total = static_cast<double>(all.size());
  for (auto &ch : chains)
    for (double &v : ch) {
      double less = 0, equal = 0;
      for (double w : all) {
        less += w < v;
        equal += w == v;
      }
      const double rank = less + (equal + 1.0) / 2.0;
      v = inverse_normal_cdf((rank - 0.375) / (n_total + 0.25));
    }
  const double n = half;
  std::vector<double> means;
  double w = 0.0;
  for (auto &ch : chains) {
    const double mu = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
    means.push_back(mu);
    double s = 0.0;
    for (double v : ch)
      s += (v - mu) * (v - mu);
    w += s / (n - 1);
  }
  w /= chains.size();
  const double grand =
      std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double b = 0.0;
  for (double mu : means)
    b += (mu - grand) * (mu - grand);
  b *= n / (means.size() - 1);
  return std::sqrt(((n - 1) / n * w + b / n) / w);
}

Matrix iid_draws(int m, int n, Rng &rng, double shift_per_chain = 0.0) {
  Matrix d(m, n);
  for (int c = 0; c < m; ++c)
    for (int i = 0; i < n; ++i)
      d(c, i) = standard_normal(rng) + shift_per_chain * c;
  return d;
}

} // namespace

TEST_CASE("rank-normalized split-Rhat matches a direct computation") {
  Rng rng(3);
  for (double shift : {0.0, 0.3, 2.0}) {
    const Matrix d = iid_draws(4, 300, rng, shift);
    CHECK(split_rhat_rank_normalized(d) ==
          doctest::Approx(naive_rhat(d)).epsilon(1e-12));
  }
  // ties
  Matrix t(2, 8);
  t << 1, 1, 2, 2, 3, 3, 1, 2, 2, 2, 1, 1, 3, 1, 2, 2;
  CHECK(split_rhat_rank_normalized(t) ==
        doctest::Approx(naive_rhat(t)).epsilon(1e-12));
}

TEST_CASE("Rhat is near one for mixed chains and large for separated ones") {
  Rng rng(4);
  CHECK(split_rhat_rank_normalized(iid_draws(8, 2000, rng)) < 1.005);
  CHECK(split_rhat_rank_normalized(iid_draws(8, 2000, rng, 1.0)) > 1.5);
  // a trend inside each chain is caught by the split
  Matrix trend(4, 1000);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < 1000; ++i)
      trend(c, i) = i / 100.0 + 0.01 * standard_normal(rng);
  CHECK(split_rhat_rank_normalized(trend) > 1.5);
}

TEST_CASE("Rhat is invariant under monotone transforms") {
  Rng rng(5);
  const Matrix d = iid_draws(4, 500, rng, 0.2);
  const Matrix e = d.array().exp().matrix();
  CHECK(split_rhat_rank_normalized(d) == split_rhat_rank_normalized(e));
}

TEST_CASE("Rhat input checks") {
  CHECK_THROWS_AS(split_rhat_rank_normalized(Matrix::Ones(4, 100)),
                  ZeroVariance);
  CHECK_THROWS_AS(split_rhat_rank_normalized(Matrix::Random(1, 100)),
                  DomainError);
  CHECK_THROWS_AS(split_rhat_rank_normalized(Matrix::Random(3, 3)),
                  DomainError);
}

TEST_CASE("percentile interpolates linearly") {
  const std::vector<double> v{5, 1, 3, 2, 4};
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 5.0);
  CHECK(percentile(v, 0.5) == 3.0);
  CHECK(percentile(v, 0.1) == doctest::Approx(1.4));
  CHECK(percentile({7.0}, 0.9) == 7.0);
}

TEST_CASE("rolling mean error") {
  const std::vector<double> v{1.0, 3.0, 2.0, 6.0};
  const auto e = rolling_mean_error(v, 2.0);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(0.0));
  CHECK(e[2] == doctest::Approx(0.0));
  CHECK(e[3] == doctest::Approx(1.0));
}

TEST_CASE("error bands") {
  const auto band = aggregate_error_curves({{1, 10}, {2, 20}, {3, 30}});
  CHECK(band.median == std::vector<double>{2, 20});
  CHECK(band.p10[0] == doctest::Approx(1.2));
  CHECK(band.p90[1] == doctest::Approx(28.0));
}

TEST_CASE("well classification and transition counting") {
  CHECK(classify_well(Vector::Constant(3, 0.1), 1e-3) == Well::plus);
  CHECK(classify_well(Vector::Constant(3, -0.1), 1e-3) == Well::minus);
  CHECK(classify_well((Vector(3) << 0.1, 0.1, 5e-4).finished(), 1e-3) ==
        Well::neither);
  CHECK(classify_well((Vector(2) << 0.1, -0.1).finished(), 1e-3) ==
        Well::neither);

  TransitionCounter tc;
  for (Well w : {Well::neither, Well::plus, Well::neither, Well::plus,
                 Well::minus, Well::neither, Well::minus, Well::plus})
    tc.observe(w);
  CHECK(tc.transitions() == 2);
  CHECK(tc.observed() == 8);

  Matrix a(4, 2), b(3, 2);
  a << 0.5, 0.5, -0.5, -0.5, 0.0, 0.0, 0.5, 0.5;
  b << 0.5, 0.5, 0.4, 0.2, 0.0, -0.3;
  const auto tr = count_well_transitions({a, b});
  CHECK(tr.per_chain_counts == std::vector<std::int64_t>{2, 0});
  CHECK(tr.mean() == 1.0);
  CHECK(tr.zero_fraction() == 0.5);
}

TEST_CASE("acceptance bursts") {
  const bool flags[] = {true, true, false, true, false, false, false, true};
  const auto s = acceptance_stats(flags);
  CHECK(s.steps == 8);
  CHECK(s.rate == doctest::Approx(0.5));
  CHECK(s.accept_bursts.at(2) == 1);
  CHECK(s.accept_bursts.at(1) == 2);
  CHECK(s.reject_bursts.at(1) == 1);
  CHECK(s.reject_bursts.at(3) == 1);
}
