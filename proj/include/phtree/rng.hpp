#pragma once

#include <cstdint>
#include <random>

namespace phtree {

/// Per-play engine. Streams are derived from a master seed by index so that
/// plays can run in any order on any number of threads.
using PlayEngine = std::mt19937_64;

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of stream `stream` under `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform double in [0,1) from the top 53 bits.
inline double uniform01(PlayEngine& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, bound) by multiply-shift; platform independent.
inline int uniform_below(PlayEngine& engine, int bound) {
    const auto x = static_cast<unsigned __int128>(engine()) * static_cast<unsigned __int128>(bound);
    return static_cast<int>(x >> 64);
}

} // namespace phtree
