#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace ptelm {

// Deterministic random stream.
//
// The engine is std::mt19937_64, whose raw output sequence is pinned down by
// the C++ standard, but the standard *distributions* are not — their mapping
// from engine output to values is implementation-defined. Every mapping here
// (uniform reals, bounded integers, shuffling, gaussians) is therefore done
// by hand so that a given seed produces bit-identical results on every
// platform and standard library.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1) with 53 bits of precision.
    double unit() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + unit() * (hi - lo);
    }

    // Uniform integer in [0, n), n >= 1, via rejection sampling so there is
    // no modulo bias.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller. Consumes exactly two raw draws per
    // call; the sine partner is discarded so the stream position stays a
    // simple function of the call count.
    double gaussian();

    // In-place Fisher-Yates shuffle; consumes size()-1 bounded draws.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        if (values.size() < 2) return;
        for (std::size_t i = values.size() - 1; i > 0; --i) {
            std::uint64_t j = below(static_cast<std::uint64_t>(i) + 1);
            std::swap(values[i], values[static_cast<std::size_t>(j)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace ptelm
