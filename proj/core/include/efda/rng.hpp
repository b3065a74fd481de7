#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace efda {

// Deterministic random source. The seed->stream mapping is fixed by
// construction and does not depend on library internals that are free to
// change between standard library releases:
//   * the engine is std::mt19937_64, whose output sequence is pinned by the
//     C++ standard,
//   * uniforms are (x >> 11) * 2^-53, mapping one engine draw to one double
//     in [0, 1),
//   * normals use the trigonometric Box-Muller transform on two uniforms,
//     with the second variate of each pair cached and served next.
// Golden files produced with a given seed therefore stay valid as long as
// this header does not change.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer on [0, bound).
    std::uint64_t uniform_index(std::uint64_t bound) {
        // Rejection from the top keeps the distribution exact.
        const std::uint64_t limit = bound * (UINT64_MAX / bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    // Standard normal via Box-Muller.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the logarithm is finite.
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace efda
