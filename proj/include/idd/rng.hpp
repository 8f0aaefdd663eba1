#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace idd::rng {

/// SplitMix64 step. Used as a seed mixer so that replication seeds derived
/// from (master, index...) agree between serial and parallel runs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive a child seed from a master seed and a path of indices.
/// derive(s, {a, b}) != derive(s, {b, a}) in general; the path acts as a
/// counter hierarchy (replication -> phase -> stream).
inline std::uint64_t derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t p : path) {
        state = out ^ (p + 0xD1B54A32D192ED03ULL);
        out = splitmix64(state);
    }
    return out;
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace idd::rng
