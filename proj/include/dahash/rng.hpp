#pragma once

// Deterministic sampling helpers. All randomized algorithms in this library
// draw through these functions so that a fixed seed reproduces the same
// stream of values regardless of the standard library's distribution
// implementations (std::uniform_real_distribution and friends are not
// pinned by the standard).

#include <cstdint>
#include <random>

namespace dahash {

// Uniform double in [0, 1) built from the top 53 bits of the generator word.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

// Uniform index in [0, n). Modulo bias is negligible for the population and
// index sizes used here and keeps the draw to a single generator word.
inline std::size_t uniform_index(std::mt19937_64& gen, std::size_t n) {
    return static_cast<std::size_t>(gen() % static_cast<std::uint64_t>(n));
}

// SplitMix64 step; used to derive independent per-task seeds from one base
// seed without correlating the downstream mt19937_64 streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for subtask (a, b) of a run keyed by `base`.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(base ^ (a * 0x9e3779b97f4a7c15ULL)) ^ b);
}

}  // namespace dahash
