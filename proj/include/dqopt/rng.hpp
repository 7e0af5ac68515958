#pragma once

#include <cstdint>
#include <random>

namespace dqopt::rng {

// splitmix64 finalizer over (seed, tag). Used everywhere a sub-stream seed is
// derived, so consuming more randomness in one component cannot shift another.
inline constexpr std::uint64_t mix(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Fixed per-purpose tags for deriving sub-streams from a scenario seed.
inline constexpr std::uint64_t kGraphStream = 1;
inline constexpr std::uint64_t kCostStream = 2;
inline constexpr std::uint64_t kInitStream = 3;
inline constexpr std::uint64_t kProtocolStream = 4;

// mt19937_64 plus hand-rolled draw helpers. <random> distributions are
// implementation-defined, so traces would not replay across standard
// libraries; these helpers keep every draw fully specified.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next() { return gen_(); }

  // uniform double in [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // unbiased uniform in [0, bound), bound >= 1 (rejection sampling)
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % bound;
  }

  // uniform integer in [lo, hi] inclusive
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace dqopt::rng
