#pragma once

#include <cstdint>
#include <vector>

namespace glosskit {

// SplitMix64. Pinned here (rather than std::mt19937_64) so that shuffles
// and synthetic-data generation are reproducible across standard libraries
// and platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). bound == 0 is invalid.
  uint64_t next_below(uint64_t bound) { return next() % bound; }

  // Uniform double in [0, 1) with 53 bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller (polar form avoided: determinism over
  // rejection counts is simpler with the trigonometric form).
  double next_gaussian();

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// In-place Fisher-Yates driven by SplitMix64: for i from n-1 down to 1,
// j = next() mod (i+1), swap(v[i], v[j]). The exact procedure is part of
// the output contract of deterministic shuffles.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& v, uint64_t seed) {
  SplitMix64 rng(seed);
  for (size_t i = v.size(); i > 1; --i) {
    size_t j = static_cast<size_t>(rng.next_below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace glosskit
