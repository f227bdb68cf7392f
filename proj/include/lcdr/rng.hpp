#ifndef LCDR_RNG_HPP
#define LCDR_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace lcdr {

/// Deterministic 64-bit generator (splitmix64). Chosen over std::mt19937 +
/// std:: distributions because the standard distributions are
/// implementation-defined; this keeps generated corpora byte-identical
/// across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Standard normal via Box-Muller (no cached second value, so the
    /// draw count per sample is fixed).
    double normal() {
        double u1 = 1.0 - uniform01(); // (0, 1]
        double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t state_;
};

/// Stream derivation: maps (seed, stream) to an independent child seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 6) + (stream >> 2));
    z += 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// In-place Fisher-Yates shuffle with a pinned algorithm (std::shuffle is
/// implementation-defined ordering).
template <class T>
void shuffle(std::vector<T>& v, Rng& rng) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng.uniform_index(i + 1));
        std::swap(v[i], v[j]);
    }
}

} // namespace lcdr

#endif
