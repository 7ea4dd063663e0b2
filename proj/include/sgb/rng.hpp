#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic randomness helpers. Everything is hand-rolled on top of
// std::mt19937_64 because the standard distributions (and std::shuffle) are
// not guaranteed to produce the same sequences across library
// implementations, and seeded runs must be reproducible everywhere.
namespace sgb::rng {

inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// Uniform index in [0, n). Modulo bias is negligible for the ranges used
/// here and keeps the draw a single generator call.
inline std::size_t uniform_index(std::mt19937_64& g, std::size_t n) {
    return static_cast<std::size_t>(g() % n);
}

/// Standard normal via Box-Muller, one deviate per call.
inline double gaussian(std::mt19937_64& g) {
    double u1 = uniform01(g);
    while (u1 <= 0.0) u1 = uniform01(g);
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Fisher-Yates permutation of 0..n-1.
inline std::vector<std::size_t> shuffled_order(std::size_t n,
                                               std::mt19937_64& g) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const std::size_t j = i + uniform_index(g, n - i);
        std::swap(order[i], order[j]);
    }
    return order;
}

}  // namespace sgb::rng
