#pragma once
// Deterministic randomness for the whole library.
//
// Generator: SplitMix64 (Steele/Lea/Flood; Vigna's splitmix64.c constants).
// The state walks a counter by the golden-gamma increment and every output is
// a strong mix of that counter, which makes substreams cheap: mixing the seed
// once and offsetting by a small stream tag lands the streams in unrelated
// regions of the counter orbit.
//
// Substream contract (keep in sync with README):
//   root      = mix(seed)            one SplitMix64 step from the raw seed
//   stream(t) = SplitMix64 seeded with mix(root + t)
// Tags: 0 = instance generation, 1 = policy gate draws, 2 = LP rounding.
// Replication r of an experiment uses seed = base_seed + r.

#include <cstdint>
#include <vector>

namespace fulfill {

inline std::uint64_t splitmix_step(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

struct Rng {
  std::uint64_t state = 0;
  Rng() = default;
  explicit Rng(std::uint64_t s) : state(s) {}

  std::uint64_t next() { return splitmix_step(state); }

  // uniform in [0,1), 53-bit resolution
  double u01() { return double(next() >> 11) * 0x1.0p-53; }

  // uniform integer in [0,n); n > 0
  long long below(long long n) {
    long long r = (long long)(u01() * double(n));
    return r >= n ? n - 1 : r;  // guard the (theoretical) rounding edge
  }

  double uniform(double a, double b) { return a + (b - a) * u01(); }

  bool bernoulli(double p) { return u01() < p; }

  // index sampled proportionally to probs (assumed to sum to ~1)
  int categorical(const std::vector<double>& probs) {
    double u = u01(), acc = 0.0;
    for (size_t j = 0; j + 1 < probs.size(); ++j) {
      acc += probs[j];
      if (u < acc) return (int)j;
    }
    return (int)probs.size() - 1;
  }
};

enum : std::uint64_t {
  kStreamInstance = 0,
  kStreamGate = 1,
  kStreamRounding = 2,
};

inline Rng substream(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t s = seed;
  std::uint64_t root = splitmix_step(s);
  std::uint64_t t = root + tag;
  return Rng(splitmix_step(t));
}

}  // namespace fulfill
