#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "types.hpp"

namespace isac {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Deterministic random stream keyed by (root seed, label).
///
/// Distinct labels give statistically independent streams from one root seed.
/// Uniforms and normals are derived from raw 64-bit engine output by hand, so
/// the sequence does not depend on the standard library's distribution
/// implementations.
class RandomStream {
public:
    RandomStream(std::uint64_t root_seed, std::string label)
        : root_seed_(root_seed),
          label_(std::move(label)),
          engine_(splitmix64(root_seed_ ^ splitmix64(fnv1a64(label_)))) {}

    std::uint64_t root_seed() const noexcept { return root_seed_; }
    const std::string& label() const noexcept { return label_; }

    /// Uniform on (0, 1].
    double uniform() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 2.0 * kPi * uniform();
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// CN(0, variance): real and imaginary parts each N(0, variance/2).
    cplx complex_normal(double variance) {
        const double s = std::sqrt(0.5 * variance);
        const double re = normal();
        const double im = normal();
        return {s * re, s * im};
    }

private:
    std::uint64_t root_seed_;
    std::string label_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace isac
