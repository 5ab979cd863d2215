#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>

namespace qbethe {

using cd = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Integer power by repeated squaring; deterministic, handles negative exponents.
inline cd ipow(cd base, long long e) {
    if (e < 0) return 1.0 / ipow(base, -e);
    cd acc{1.0, 0.0};
    cd b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

inline double ipow(double base, long long e) {
    if (e < 0) return 1.0 / ipow(base, -e);
    double acc = 1.0, b = base;
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

// |a - b| relative to the largest magnitude among the combined terms, floored at 1
// so residuals of O(1) quantities read naturally.
inline double rel_residual(cd lhs, cd rhs) {
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    return std::abs(lhs - rhs) / scale;
}

// Uniform double in [0, 1) built directly from engine output; unlike
// std::uniform_real_distribution this is reproducible across standard libraries.
inline double uniform01(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

// Point drawn from an annulus, radius uniform in [rlo, rhi], angle uniform.
inline cd annulus_point(std::mt19937_64& eng, double rlo, double rhi) {
    const double r = uniform_in(eng, rlo, rhi);
    const double phi = uniform_in(eng, 0.0, 2.0 * M_PI);
    return cd{r * std::cos(phi), r * std::sin(phi)};
}

} // namespace qbethe
