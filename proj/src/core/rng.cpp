#include "rng.hpp"

#include <cmath>

namespace ptelm {

std::uint64_t RandomStream::below(std::uint64_t n) {
    if (n == 0) return 0;
    // Largest multiple of n that fits in 64 bits; draws at or above it are
    // rejected. For the small n used in shuffling, rejections are rare.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        std::uint64_t x = engine_();
        if (x < limit) return x % n;
    }
}

double RandomStream::gaussian() {
    // Box-Muller with u1 in (0, 1] so the log never sees zero.
    double u1 = 1.0 - unit();
    double u2 = unit();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace ptelm
