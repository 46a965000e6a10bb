#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "constants.hpp"

namespace atomsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Per-shot rng stream: master seed -> independent, reproducible sub-seed.
inline std::uint64_t shot_seed(std::uint64_t master, std::uint64_t shot) {
    std::uint64_t s = master;
    splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL + shot * 0x9e3779b97f4a7c15ULL;
    return splitmix64(s);
}

inline double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa, open interval (0, 1]
    return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

// Box-Muller standard normal. Hand-rolled (two uniforms per draw) so the
// draw sequence does not depend on the standard library's
// normal_distribution implementation.
inline double gaussian(std::mt19937_64& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(constants::two_pi * u2);
}

} // namespace atomsim
