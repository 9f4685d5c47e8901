#pragma once

// Seeded random variates with output fixed across platforms.
//
// std::mt19937_64 is pinned down by the standard; the distributions in
// <random> are not, so uniforms, normals and gammas are generated here.

#include <bit>
#include <cmath>
#include <cstdint>
#include <random>

namespace alphacomp {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for a stream keyed by (base seed, alpha). Keyed on the value rather
/// than a grid index, so adding grid points never changes existing ones.
inline std::uint64_t derive_seed(std::uint64_t base, double alpha) {
    return splitmix64(base ^ splitmix64(std::bit_cast<std::uint64_t>(alpha)));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on (0, 1); 53 random bits, zero excluded.
    double uniform() {
        double u;
        do {
            u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        } while (u == 0.0);
        return u;
    }

    /// Standard normal, Marsaglia polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double a, b, s;
        do {
            a = 2.0 * uniform() - 1.0;
            b = 2.0 * uniform() - 1.0;
            s = a * a + b * b;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = b * f;
        has_spare_ = true;
        return a * f;
    }

    /// log of a Gamma(shape, 1) variate. Marsaglia-Tsang squeeze for
    /// shape >= 1; smaller shapes use Gamma(shape + 1) * U^(1/shape).
    /// Working on the log scale keeps full precision for huge shapes.
    double log_gamma_variate(double shape) {
        if (shape < 1.0) {
            const double boost = std::log(uniform()) / shape;
            return log_gamma_variate(shape + 1.0) + boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, w;
            do {
                z = normal();
                w = c * z;
            } while (w <= -1.0);
            const double log_v = 3.0 * std::log1p(w);
            const double u = uniform();
            const double z2 = z * z;
            if (u < 1.0 - 0.0331 * z2 * z2) return std::log(d) + log_v;
            if (std::log(u) < 0.5 * z2 + d * (log_v - std::expm1(log_v))) {
                return std::log(d) + log_v;
            }
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace alphacomp
