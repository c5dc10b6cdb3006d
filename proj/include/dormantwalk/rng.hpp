#pragma once

#include <cmath>
#include <cstdint>

namespace dormantwalk {

/// PCG32 generator (Melissa O'Neill's pcg32, oneseq init) with stream
/// selection.  Each (seed, stream) pair yields an independent sequence, so
/// Monte Carlo drivers hand one stream per path and stay reproducible under
/// any scheduling: results depend on the master seed and path index only.
class Pcg32 {
  public:
    Pcg32(std::uint64_t seed, std::uint64_t stream) {
        inc_ = (stream << 1u) | 1u;
        state_ = 0u;
        next_u32();
        state_ += 0x853c49e6748fea9bULL ^ seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    /// Uniform in [0,1) with 53-bit resolution.
    double next_double() {
        const std::uint64_t hi = next_u32();
        const std::uint64_t lo = next_u32();
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n), n >= 1 (Lemire's multiply-shift with rejection).
    std::uint32_t bounded(std::uint32_t n) {
        std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            const std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                m = static_cast<std::uint64_t>(next_u32()) * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    /// Exponential holding time with the given rate.
    double exponential(double rate) { return -std::log1p(-next_double()) / rate; }

    /// Bernoulli(p).
    bool bernoulli(double p) { return next_double() < p; }

  private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

}  // namespace dormantwalk
