#pragma once
#include <cstdint>
#include <random>

namespace deconv {

// SplitMix64: the documented seed-derivation contract.  Replication k of a run
// with base seed s uses engine_for(s, k); streams for distinct k are
// independent for practical purposes and insensitive to execution order.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    return splitmix64(base + 0x9E3779B97F4A7C15ull * (index + 1));
}

inline std::mt19937_64 engine_for(std::uint64_t base, std::uint64_t index) {
    return std::mt19937_64(derive_seed(base, index));
}

} // namespace deconv
