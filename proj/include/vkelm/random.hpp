#pragma once

#include <cstdint>

namespace vkelm {

/// SplitMix64 (Steele, Lea & Flood 2014). Every stochastic step in the
/// library draws from this generator so results are identical on every
/// platform; std:: distributions are implementation-defined and are never used.
///
/// Derived quantities:
///   uniform01()  -> (next() >> 11) * 2^-53, in [0, 1)
///   bounded(n)   -> high 64 bits of next() * n (Lemire multiply-shift), in [0, n)
///   normal()     -> Box-Muller cosine branch from two uniforms, one value per call
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept;

    double uniform01() noexcept;
    double uniform(double lo, double hi) noexcept;
    std::uint64_t bounded(std::uint64_t n) noexcept;
    // Inclusive integer range [lo, hi].
    long long uniform_int(long long lo, long long hi) noexcept;
    double normal(double mean = 0.0, double sd = 1.0) noexcept;

    std::uint64_t state() const noexcept { return state_; }

private:
    std::uint64_t state_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) noexcept;

/// Seed for an independent substream identified by (seed, a, b). Used for
/// per-candidate generators so results do not depend on evaluation order.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

}  // namespace vkelm
