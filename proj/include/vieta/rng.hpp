#pragma once

#include <cstdint>

namespace vieta {

/// Counter-based deterministic generator (SplitMix64 finalizer over a
/// seed/counter pair). The same (seed, index) yields the same output on every
/// platform, which is what makes trajectory records reproducible byte for
/// byte.
inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Uniform double in [0,1) with 53 random bits.
inline double counter_uniform(std::uint64_t seed, std::uint64_t index) {
    return static_cast<double>(counter_hash(seed, index) >> 11) * 0x1.0p-53;
}

/// Sequential stream view over the counter generator.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t start_index = 0)
        : seed_(seed), index_(start_index) {}

    std::uint64_t next_u64() { return counter_hash(seed_, index_++); }
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }
    std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t index() const { return index_; }

  private:
    std::uint64_t seed_;
    std::uint64_t index_;
};

/// Derive an independent child seed (worker streams, block bootstraps).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
    return counter_hash(seed ^ 0xa0761d6478bd642fULL, salt);
}

} // namespace vieta
