#pragma once

#include <cstdint>
#include <random>

namespace hilbert_ot {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Independent generator for draw `index` of the stream identified by `seed`.
/// Results depend only on (seed, index), never on scheduling.
inline Rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

}  // namespace hilbert_ot
