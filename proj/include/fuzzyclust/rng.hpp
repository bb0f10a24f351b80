#pragma once

#include <cstdint>

namespace fuzzyclust {

/// Counter-based pseudo-random generator (splitmix64).
///
/// The n-th draw is mix(seed + (n+1) * 0x9E3779B97F4A7C15), so the stream is
/// a pure function of (seed, counter) and identical on every platform.
/// All randomized pieces of the library (graph generator, random
/// initialization) draw from this engine so that runs are reproducible
/// from the seed alone.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, bound). Rejection-free modulo is fine here:
    /// bound is tiny relative to 2^64, so the bias is far below any use.
    std::uint64_t next_below(std::uint64_t bound) {
        return next() % bound;
    }

private:
    std::uint64_t state_;
};

}  // namespace fuzzyclust
