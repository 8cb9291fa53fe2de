#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace riskalloc {

namespace detail {

/// SplitMix64 finalizer (Stafford mix 13). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

} // namespace detail

/// Counter-mode SplitMix64 stream.
///
/// A substream is addressed by (seed, subsystem_index, draw_index); its k-th
/// output is mix64(base + k * golden) with base derived by hashing the three
/// address words. Substreams are independent and may be consumed in any
/// order, so Monte Carlo results do not depend on evaluation chunking.
/// The generator is fixed; golden tests pin its exact outputs.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed)
        : state_(detail::mix64(seed + detail::kGolden)) {}

    RandomStream(std::uint64_t seed, std::uint64_t subsystem_index, std::uint64_t draw_index)
        : state_(derive(seed, subsystem_index, draw_index)) {}

    std::uint64_t next_u64() {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in (0, 1]; safe as a log() argument.
    double next_unit_positive() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    static std::uint64_t derive(std::uint64_t seed, std::uint64_t subsystem_index,
                                std::uint64_t draw_index) {
        std::uint64_t h = detail::mix64(seed + detail::kGolden);
        h = detail::mix64(h ^ (subsystem_index + detail::kGolden));
        h = detail::mix64(h ^ (draw_index + detail::kGolden));
        return h;
    }

private:
    std::uint64_t state_;
};

/// Standard normal draw via Box-Muller; consumes exactly two stream values.
inline double sample_standard_normal(RandomStream& stream) {
    double u1 = stream.next_unit_positive();
    double u2 = stream.next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace riskalloc
