#pragma once

#include <cstdint>

namespace tfac {

/// Counter-based generator: draw k of stream `seed` is splitmix64(seed, k).
///
/// Every draw is a pure function of (seed, stream, index), so meshes and
/// initial data are reproducible bit-for-bit on any platform and can be
/// generated in parallel without changing results.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : key_(mix(seed ^ (stream * 0xD1B54A32D192ED03ULL))) {}

    [[nodiscard]] std::uint64_t bits(std::uint64_t index) const noexcept {
        return mix(key_ + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform draw in the open interval (0, 1).
    [[nodiscard]] double uniform(std::uint64_t index) const noexcept {
        return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform draw in (lo, hi).
    [[nodiscard]] double uniform(std::uint64_t index, double lo, double hi) const noexcept {
        return lo + (hi - lo) * uniform(index);
    }

private:
    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
};

}  // namespace tfac
