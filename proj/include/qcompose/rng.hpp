#pragma once

#include <cstdint>
#include <random>

namespace qcompose {

// Seeded random source with explicit draw functions. All randomness in the
// library flows through this wrapper so that runs are reproducible for a
// given seed regardless of standard-library distribution internals.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, n)
    int uniform_int(int n) {
        return static_cast<int>(uniform() * static_cast<double>(n));
    }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace qcompose
