#pragma once

#include <cstdint>

namespace innerlab {

/// Counter-based splittable generator: sample i of stream `seed` is a
/// stateless hash of (seed, i), so serial and parallel enumeration produce
/// identical values in any order.
struct CounterRng {
    static std::uint64_t mix(std::uint64_t x) {
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

    static std::uint64_t value(std::uint64_t seed, std::uint64_t index) {
        return mix(seed + (index + 1) * 0x9E3779B97F4A7C15ULL);
    }

    /// Uniform in [0, 1) with 53 random bits.
    static double uniform01(std::uint64_t seed, std::uint64_t index) {
        return static_cast<double>(value(seed, index) >> 11) * 0x1.0p-53;
    }
};

}  // namespace innerlab
