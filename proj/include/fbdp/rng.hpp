#pragma once

// Counter-based Gaussian noise stream.  Every variate is addressed by
// (seed, trial, stage, coord), so trials can be generated in any order or in
// parallel and still reproduce bit for bit.  Coordinate 0 of stage 0 is
// reserved for the message draw; noise coordinates are 1-based, which makes
// the scalar stream equal to coordinate 1 of the vector stream.

#include <cstdint>

namespace fbdp {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t trial, std::uint32_t stage,
                                  std::uint32_t coord) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ ((static_cast<std::uint64_t>(stage) << 32) | coord));
    return h;
}

// Top 53 bits to a double in (0, 1); offset by half an ulp to avoid 0.
inline double uniform01(std::uint64_t bits) {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal variate at counter (seed, trial, stage, coord), coord >= 1.
/// Box-Muller on two decorrelated uniforms derived from the same counter.
double gaussian_noise(std::uint64_t seed, std::uint64_t trial, std::uint32_t stage,
                      std::uint32_t coord);

/// Equiprobable message bit for the trial, drawn at counter (stage 0, coord 0).
bool message_draw(std::uint64_t seed, std::uint64_t trial);

}  // namespace fbdp
