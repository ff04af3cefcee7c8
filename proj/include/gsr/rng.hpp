#pragma once

#include <cmath>
#include <cstdint>

namespace gsr {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

/// Derive the seed of an independent child stream. Used by the benchmark
/// runner to give every (parameter point, trial) its own stream so that
/// parallel execution reproduces the serial results bit for bit.
inline std::uint64_t split_stream(std::uint64_t parent_seed, std::uint64_t key) {
    return detail::mix64(parent_seed ^ (0x9E3779B97F4A7C15ull * (key + 1)));
}

/**
 * SplitMix64 generator. Chosen over std::mt19937_64 + <random>
 * distributions because the standard distributions are not portable
 * across library implementations; samples from this class are identical
 * on every platform for a given seed.
 *
 * Draw order is part of the reproducibility contract: uniform doubles map
 * the top 53 bits of the next output to [0,1); gaussians use Box-Muller on
 * two uniforms and hand out the pair in (cos, sin) order.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return detail::mix64(state_);
    }

    /// Uniform on [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1]; safe under log().
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Uniform integer in [0, bound) by rejection (unbiased).
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_double_open();
        const double u2 = next_double();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// +1 or -1 with equal probability.
    double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

    std::uint64_t state() const { return state_; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace gsr
