#include "dikin/rng.hpp"

namespace dikin {

std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

// FNV-1a, 64 bit.
std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace

std::uint64_t chain_seed(std::uint64_t master_seed,
                         std::string_view experiment_id, std::uint64_t chain) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ hash_label(experiment_id));
  h = mix64(h ^ chain);
  return h;
}

} // namespace dikin
