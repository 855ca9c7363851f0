#pragma once

#include <cstdint>
#include <random>

namespace gfspread {

// Bounded draw with explicit rejection; std::uniform_int_distribution is not
// pinned down by the standard, and seeded reports must match across
// platforms byte for byte.
inline std::uint64_t rng_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        std::uint64_t x = rng();
        if (x >= threshold) return x % bound;
    }
}

}  // namespace gfspread
