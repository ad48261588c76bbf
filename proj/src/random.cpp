#include "vkelm/random.hpp"

#include <cmath>
#include <numbers>

namespace vkelm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
__extension__ using uint128 = unsigned __int128;
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

double SplitMix64::uniform01() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::uniform(double lo, double hi) noexcept {
    return lo + (hi - lo) * uniform01();
}

std::uint64_t SplitMix64::bounded(std::uint64_t n) noexcept {
    const uint128 product = static_cast<uint128>(next()) * n;
    return static_cast<std::uint64_t>(product >> 64);
}

long long SplitMix64::uniform_int(long long lo, long long hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<long long>(bounded(span));
}

double SplitMix64::normal(double mean, double sd) noexcept {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t s = mix64(seed + kGolden);
    s = mix64(s ^ (a * kGolden + 0x632BE59BD9B4E019ULL));
    s = mix64(s ^ (b * kGolden + 0x85157AF5ULL));
    return s;
}

}  // namespace vkelm
