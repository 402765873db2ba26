#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gtd {

// All stochastic steps (splits, shuffles, resamples, weight init) draw from
// this wrapper instead of std::*_distribution, whose output is
// implementation-defined. Everything here is fully specified by the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n) by rejection sampling.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = engine_();
        } while (r >= limit);
        return r % n;
    }

    // Fisher-Yates, back to front.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// Counter-based seed derivation: component k of a seeded ensemble gets
// seed + k, so member fits are replayable independently of fit order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t component_index) {
    return seed + component_index;
}

} // namespace gtd
