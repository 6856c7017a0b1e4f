#pragma once
// Branch-light log2 for hot grid loops. Max relative error is about 2e-11,
// checked against std::log2 in the unit tests.

#include <bit>
#include <cstdint>

namespace bcpid {

inline double fast_log2(double v) {
    const std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    int e = static_cast<int>(bits >> 52) - 1023;
    double m = std::bit_cast<double>((bits & 0x000fffffffffffffULL) | 0x3ff0000000000000ULL);
    if (m > 1.4142135623730951) {
        m *= 0.5;
        ++e;
    }
    // atanh series for ln(m), m in [sqrt(2)/2, sqrt(2)]
    const double w = (m - 1.0) / (m + 1.0);
    const double w2 = w * w;
    const double ln_m =
        2.0 * w *
        (1.0 + w2 * (1.0 / 3.0 + w2 * (1.0 / 5.0 + w2 * (1.0 / 7.0 + w2 * (1.0 / 9.0 + w2 * (1.0 / 11.0))))));
    return static_cast<double>(e) + ln_m * 1.4426950408889634074;
}

// x*log2(x) with the 0*log(0) = 0 convention.
inline double fast_xlog2x(double x) { return x > 0.0 ? x * fast_log2(x) : 0.0; }

}  // namespace bcpid
