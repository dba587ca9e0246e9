#include "fbdp/rng.hpp"

#include <cmath>

namespace fbdp {

double gaussian_noise(std::uint64_t seed, std::uint64_t trial, std::uint32_t stage,
                      std::uint32_t coord) {
    const std::uint64_t h = detail::counter_hash(seed, trial, stage, coord);
    const double u1 = detail::uniform01(h);
    const double u2 = detail::uniform01(detail::splitmix64(h ^ 0x5851f42d4c957f2dULL));
    constexpr double two_pi = 6.28318530717958647693;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

bool message_draw(std::uint64_t seed, std::uint64_t trial) {
    return (detail::counter_hash(seed, trial, 0, 0) & 1ULL) != 0;
}

}  // namespace fbdp
