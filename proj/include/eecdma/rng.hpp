#ifndef EECDMA_RNG_HPP
#define EECDMA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace eecdma {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index));
}

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    return substream_seed(substream_seed(seed, a), b);
}

/**
 * Seeded RNG with hand-rolled variate mappings.
 *
 * std::mt19937_64 is fully standardized, but the std distributions are not;
 * mapping raw draws ourselves keeps every stream reproducible across
 * compilers and platforms. Draw order is part of the contract.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; consumes two uniforms, no caching.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Rayleigh variate parameterized by its mean (scale = mean*sqrt(2/pi)).
    double rayleigh(double mean) {
        const double sigma = mean * std::sqrt(2.0 / 3.14159265358979323846);
        double u = uniform();
        if (u > 1.0 - 1e-16) u = 1.0 - 1e-16;
        return sigma * std::sqrt(-2.0 * std::log(1.0 - u));
    }

    /// Equiprobable +1 / -1.
    int sign() { return (engine_() & 1u) ? 1 : -1; }

private:
    std::mt19937_64 engine_;
};

}  // namespace eecdma

#endif  // EECDMA_RNG_HPP
