#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace filmforge {

// Seeded random stream with explicit, stable conversions.
//
// All randomized components (agent, GA, tests) draw from one of these so a
// run is reproducible from its seed alone. Conversions are hand-rolled on
// top of mt19937_64 rather than <random> distributions, which keeps the
// draw sequence identical across standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). One draw per call (multiply-shift mapping).
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform01() * static_cast<double>(n)) % n;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Box-Muller, two uniform draws per call, no cached spare.
    double normal(double mean, double sigma) {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace filmforge
