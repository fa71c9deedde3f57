#pragma once

#include <cstdint>
#include <string_view>

namespace nbm {

// Deterministic random streams.
//
// Every stochastic step of the library draws from its own stream, derived
// from a user seed plus a step tag (and optional indices).  Sampling one
// step never shifts another step's sequence, and the raw bit stream is
// fully specified here rather than delegated to implementation-defined
// std:: distributions, so identical seeds give identical results across
// runs, platforms and thread schedules.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

} // namespace detail

/// xoshiro256++ engine seeded through splitmix64.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        std::uint64_t s = seed;
        for (auto& word : state_) word = detail::splitmix64(s);
    }

    /// Stream keyed by (seed, tag); optional indices key sub-streams such
    /// as (seed, tag, cell, replicate).
    static RngStream derive(std::uint64_t seed, std::string_view tag,
                            std::uint64_t a = 0, std::uint64_t b = 0) {
        std::uint64_t h = seed;
        detail::splitmix64(h);
        for (unsigned char ch : tag) {
            h ^= ch;
            detail::splitmix64(h);
        }
        h ^= a;
        detail::splitmix64(h);
        h ^= b;
        detail::splitmix64(h);
        return RngStream(h);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result =
            detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_range(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    /// Uniform integer in {0, ..., bound-1}; bound must be positive.
    /// Rejection sampling keeps the draw exactly uniform.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Fisher-Yates shuffle of values[0..count).
    template <typename T>
    void shuffle(T* values, std::size_t count) {
        for (std::size_t i = count; i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            T tmp = values[i - 1];
            values[i - 1] = values[j];
            values[j] = tmp;
        }
    }

private:
    std::uint64_t state_[4];
};

} // namespace nbm
