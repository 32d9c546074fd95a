#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

// Deterministic random primitives on top of std::mt19937_64. The standard
// distribution objects are implementation-defined, so anything that must be
// reproducible across toolchains draws through these helpers instead.

namespace mih::rng {

/// Uniform integer in [0, bound) by Lemire's multiply-shift rejection
/// method; unbiased and identical on every platform. bound must be > 0.
inline std::uint32_t bounded(std::mt19937_64& gen, std::uint32_t bound) {
    std::uint64_t x = gen() >> 32;
    std::uint64_t m = x * bound;
    auto low = static_cast<std::uint32_t>(m);
    if (low < bound) {
        const std::uint32_t threshold = (0u - bound) % bound;
        while (low < threshold) {
            x = gen() >> 32;
            m = x * bound;
            low = static_cast<std::uint32_t>(m);
        }
    }
    return static_cast<std::uint32_t>(m >> 32);
}

/// Uniform double in [0, 1) with 53 random mantissa bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Standard normal via the Box-Muller cosine branch (two draws per value,
/// no cached state, so the output is a pure function of the stream).
inline double normal(std::mt19937_64& gen, double mean, double sigma) {
    const double u1 =
        (static_cast<double>(gen() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    const double u2 = uniform01(gen);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * radius * std::cos(6.283185307179586476925286766559 * u2);
}

/// k distinct values from [0, population) by a partial Fisher-Yates
/// shuffle; order of the returned values is part of the deterministic
/// contract.
inline std::vector<std::uint32_t> sample_distinct(std::mt19937_64& gen,
                                                  std::uint32_t population,
                                                  std::uint32_t k) {
    std::vector<std::uint32_t> pool(population);
    for (std::uint32_t i = 0; i < population; ++i) pool[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
        const std::uint32_t j = i + bounded(gen, population - i);
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

} // namespace mih::rng
