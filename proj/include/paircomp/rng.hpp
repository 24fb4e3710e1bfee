#pragma once

#include <cstdint>
#include <random>

namespace paircomp {

/// splitmix64 finalizer; used to derive well-mixed child seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Deterministic per-stream seed: identical (base, stream) pairs always map
/// to the same child seed, independent of the order streams are consumed in.
/// This makes parallel and serial replication loops produce identical output.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    return splitmix64(base ^ splitmix64(stream + 0x633D5C4A51F85D2BULL));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

}  // namespace paircomp
