#pragma once
// Deterministic RNG with named derived streams.
//
// Every stochastic component draws from its own stream, keyed by a tag string
// (question id, path, rollout index, ...). Streams are independent of thread
// scheduling, so serial and parallel execution produce identical draws.
// splitmix64 core: portable, no implementation-defined std::distribution.

#include <cstdint>
#include <string>
#include <string_view>

#include "akbe/errors.hpp"

namespace akbe {

// 64-bit FNV-1a over the seed bytes followed by the tag bytes.
inline std::uint64_t mix_seed(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (int i = 0; i < 8; ++i) {
        h ^= (seed >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    for (unsigned char c : tag) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_double() < p; }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Unbiased integer in [0, n) via rejection.
    std::size_t uniform_index(std::size_t n) {
        if (n == 0) throw ContractError("uniform_index: empty range");
        if (n == 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return static_cast<std::size_t>(v % n);
    }

  private:
    std::uint64_t state_;
};

inline Rng derived_rng(std::uint64_t seed, std::string_view tag) {
    return Rng(mix_seed(seed, tag));
}

}  // namespace akbe
