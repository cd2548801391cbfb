#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace craft {

/// Deterministic RNG wrapper. All randomness in the pipeline flows from one
/// user seed through named substreams, so reruns are byte-reproducible and
/// independent stages do not share state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform double in [lo, hi). Implemented from raw engine output so the
    /// value stream does not depend on the standard library's distribution
    /// internals.
    double uniform(double lo, double hi) {
        const double u = (gen_() >> 11) * 0x1.0p-53;  // [0,1)
        return lo + (hi - lo) * u;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is always tiny vs 2^64.
        return gen_() % n;
    }

    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

/// splitmix64 finalizer, used to derive substream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Named substream: seed || tag -> independent stream seed.
inline std::uint64_t substream(std::uint64_t seed, std::string_view tag) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
    for (const char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return mix_seed(seed ^ h);
}

}  // namespace craft
