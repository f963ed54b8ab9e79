#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tangent/tensor.hpp"

namespace tangent {

/// Deterministic PRNG: xoshiro256** seeded through splitmix64, with normal
/// variates from the polar (Marsaglia) method. The stream depends only on the
/// seed and the call sequence, never on platform or threading, so any run can
/// be reproduced from its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform();       // [0, 1)
  double uniform_open();  // (0, 1]
  double gaussian();      // standard normal
  std::uint64_t uniform_below(std::uint64_t bound);  // [0, bound), unbiased

  // Independent child stream for a named purpose (e.g. one per shard).
  Rng fork(std::string_view label) const;

  std::uint64_t seed() const { return seed_; }
  static const char* algorithm() { return "xoshiro256ss/polar-box-muller"; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

// 64-bit FNV-1a, used for fingerprints and stream derivation.
std::uint64_t fnv1a64(const void* bytes, std::size_t len, std::uint64_t h = 1469598103934665603ull);
std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 1469598103934665603ull);

// i.i.d. gaussian tensor; stddev == 0 yields the constant mean tensor.
// Negative stddev is a parameter error.
Tensor gaussian(Rng& rng, std::vector<int> shape, double mean, double stddev);

// Gaussian resampled until |z| <= 2*stddev, with transformer fan-in scaling
// used by weight (re-)initialization.
Tensor truncated_normal(Rng& rng, std::vector<int> shape, double stddev);

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

}  // namespace tangent
