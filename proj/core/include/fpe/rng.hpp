#pragma once

#include <cstdint>

namespace fpe {

/// Counter-based generator: every draw is a pure hash of
/// (seed, path, step, which), so ensembles are reproducible independent of
/// evaluation order or worker count.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                         std::uint64_t which) {
    std::uint64_t h = splitmix64(seed ^ 0x243f6a8885a308d3ull);
    h = splitmix64(h ^ path);
    h = splitmix64(h ^ (step * 0x100000001b3ull));
    h = splitmix64(h ^ (which + 0x9e3779b97f4a7c15ull));
    return h;
}

/// Uniform in (0, 1), never returning the endpoints.
inline double uniform01(std::uint64_t bits) {
    return (double(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

/// Standard normal by inverse CDF (Acklam's rational approximation with one
/// Halley refinement through erfc; ~1e-15 absolute accuracy).
double normal_from_uniform(double u);

inline double standard_normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                              std::uint64_t which) {
    return normal_from_uniform(uniform01(key(seed, path, step, which)));
}

} // namespace rng
} // namespace fpe
