#pragma once

/// @file rng.hpp
/// @brief Counter-based random numbers derived from one 64-bit seed.
///
/// A draw is a pure function of (seed, stream, counter): the SplitMix64
/// finalizer applied to seed + golden * (mix(stream) + counter). Nothing is
/// stateful, so draws do not depend on evaluation order or thread count.

#include <cstdint>

namespace chemo {

/// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t random_bits(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t counter) noexcept {
    constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    return mix64(seed + kGolden * (mix64(stream + kGolden) + counter + 1));
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double random_uniform(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t counter) noexcept {
    return static_cast<double>(random_bits(seed, stream, counter) >> 11) * 0x1.0p-53;
}

/// Independent child seed, e.g. one per sweep cell.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    return random_bits(seed, 0x5eed5eed5eedULL, index);
}

/// Sequential convenience wrapper over random_uniform.
class CounterRng {
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
        : seed_(seed), stream_(stream) {}
    constexpr double uniform() noexcept { return random_uniform(seed_, stream_, counter_++); }
    constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
};

}  // namespace chemo
