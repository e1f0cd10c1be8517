#ifndef EVOP_RNG_HPP
#define EVOP_RNG_HPP

#include <cstdint>
#include <random>

namespace evop {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; used to derive independent per-task streams from one seed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(base) ^ a) ^ b);
}

/// Uniform integer in [lo, hi].
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Uniform real in [0, 1).
inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double uniform_real(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline bool coin(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace evop

#endif  // EVOP_RNG_HPP
