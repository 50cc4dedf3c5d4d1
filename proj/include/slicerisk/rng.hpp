#ifndef SLICERISK_RNG_HPP
#define SLICERISK_RNG_HPP

#include <cstdint>
#include <random>

namespace slicerisk {

using RngStream = std::mt19937_64;

// Derives a decorrelated child seed from a master seed and a stream index
// (splitmix64 finalizer). Every concurrent Monte-Carlo batch and every
// benchmark trial owns one derived stream, so results do not depend on
// scheduling order or thread count.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline RngStream make_stream(std::uint64_t seed) { return RngStream(seed); }

} // namespace slicerisk

#endif
