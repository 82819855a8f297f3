#pragma once

#include <cstdint>
#include <random>

namespace boseglow::oracle {

inline constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of substream `stream` under `master`; a pure function of both.
inline constexpr std::uint64_t streamSeed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(~stream));
}

using Engine = std::mt19937_64;

inline Engine makeStream(std::uint64_t master, std::uint64_t stream) { return Engine(streamSeed(master, stream)); }

} // namespace boseglow::oracle
