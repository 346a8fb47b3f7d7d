#pragma once

// Self-contained deterministic RNG. The stdlib distributions are
// implementation-defined, so sampling is spelled out here to keep outputs
// byte-identical across compilers and runs.

#include <cstdint>
#include <span>
#include <vector>

#include "csfq/errors.hpp"

namespace csfq::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed-splitting rule: independent stream for task `index` of a root seed.
/// Parallel schedules never change which task sees which stream.
inline std::uint64_t task_seed(std::uint64_t root, std::uint64_t index) {
    return splitmix64(root ^ splitmix64(index + 1));
}

/// xoshiro256** — small, fast, reproducible.
class Xoshiro {
  public:
    explicit Xoshiro(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& w : s_) w = x = splitmix64(x);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform in [0, 1): 53 high bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound) by rejection (unbiased).
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

/// Binomial draw: number of successes among n Bernoulli(p) trials.
inline std::uint64_t binomial(Xoshiro& g, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("binomial: probability outside [0,1]");
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < n; ++i)
        if (g.uniform() < p) ++hits;
    return hits;
}

}  // namespace csfq::rng
