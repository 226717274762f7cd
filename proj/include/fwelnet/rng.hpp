#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace fwelnet {

/// Deterministic random stream. Doubles are produced directly from the
/// mt19937_64 output so the draw sequence does not depend on the standard
/// library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream keyed by (seed, stream), e.g. one per simulation run.
    static Rng keyed(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<unsigned>(seed & 0xffffffffu),
                          static_cast<unsigned>(seed >> 32),
                          static_cast<unsigned>(stream & 0xffffffffu),
                          static_cast<unsigned>(stream >> 32)};
        Rng r(0);
        r.engine_.seed(seq);
        return r;
    }

    /// Uniform on [0, 1) with 53-bit resolution.
    double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling on the top bits; unbiased.
        std::uint64_t mask = n - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        for (;;) {
            std::uint64_t v = engine_() & mask;
            if (v < n) return v;
        }
    }

    /// Fair coin.
    bool flip() { return (engine_() & 1u) != 0; }

    /// Fisher-Yates shuffle (self-contained for reproducibility).
    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace fwelnet
