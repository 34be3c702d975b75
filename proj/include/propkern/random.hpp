#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace propkern {

// All randomness flows through mt19937_64 plus the explicit mappings below,
// so equal seeds give bitwise-equal streams on any conforming platform.
using Rng = std::mt19937_64;

// Uniform draw in [0, 1) with 53-bit resolution.
inline double uniform01(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller; one value per call, two uniforms consumed.
inline double std_normal(Rng& rng) {
    double u1 = 1.0 - uniform01(rng);  // (0, 1] keeps the log finite
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Standard Cauchy as the ratio of two independent standard normals.
inline double std_cauchy(Rng& rng) {
    double num = std_normal(rng);
    double den = std_normal(rng);
    while (den == 0.0) den = std_normal(rng);
    return num / den;
}

// Uniform draw from {0, 1, ..., n-1}.
inline std::int64_t uniform_index(Rng& rng, std::int64_t n) {
    return static_cast<std::int64_t>(uniform01(rng) * static_cast<double>(n));
}

}  // namespace propkern
