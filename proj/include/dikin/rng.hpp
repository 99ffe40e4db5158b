#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dikin {

/// Repo-wide generator. Every stochastic component draws from one of these;
/// nothing touches std::random_device.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0)
        return u;
    }
  }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Stream-split rule: chain `chain` of experiment `experiment_id` under
/// `master_seed` is seeded with hash(master_seed, experiment_id, chain).
std::uint64_t chain_seed(std::uint64_t master_seed,
                         std::string_view experiment_id, std::uint64_t chain);

} // namespace dikin
