#pragma once
/**
 * @file rng.hpp
 * @brief Counter-based, splittable random number generator.
 *
 * Value n of stream (seed, stream) is
 *
 *     mix64(key + (n + 1) * 0x9E3779B97F4A7C15),   key = mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019))
 *
 * where mix64 is the SplitMix64 finaliser. Every draw is a pure function of
 * (seed, stream, counter), so results are bit-identical across platforms and
 * independent streams can be derived without sharing state. Integer ranges use
 * Lemire's multiply-and-reject method, never std:: distributions (whose output
 * is implementation defined).
 */

#include <cstdint>

namespace crowdsim {

inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix64(seed ^ mix64(stream + 0x632BE59BD9B4E019ULL))) {}

    /// Independent generator for sub-stream `stream` of this generator's key.
    constexpr CounterRng split(std::uint64_t stream) const {
        CounterRng r(0);
        r.key_ = mix64(key_ ^ mix64(stream + 0x632BE59BD9B4E019ULL));
        return r;
    }

    constexpr std::uint64_t at(std::uint64_t n) const {
        return mix64(key_ + (n + 1) * 0x9E3779B97F4A7C15ULL);
    }

    constexpr std::uint64_t next() { return at(counter_++); }

    constexpr std::uint64_t counter() const { return counter_; }

    /// Uniform integer in [0, bound), bound > 0.
    std::uint64_t uniform_below(std::uint64_t bound) {
        __uint128_t m = static_cast<__uint128_t>(next()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<__uint128_t>(next()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
};

}  // namespace crowdsim
