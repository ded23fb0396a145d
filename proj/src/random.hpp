#pragma once

#include <cstdint>
#include <random>

namespace iaa::detail {

/// Engine for an independent stream identified by (seed, stream).
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// The standard distributions are implementation-defined, which would make
// simulated fixtures differ across standard libraries. These two are fixed.

__extension__ using uint128 = unsigned __int128;

/// Uniform integer in [0, bound), Lemire's multiply-shift with rejection.
inline std::uint64_t uniform_index(std::mt19937_64& engine, std::uint64_t bound) {
    uint128 product = static_cast<uint128>(engine()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<uint128>(engine()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(std::mt19937_64& engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace iaa::detail
