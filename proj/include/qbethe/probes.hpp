#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"

namespace qbethe {

struct ProbeOptions {
    int count = 20;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;
    double r_lo = 0.4;
    double r_hi = 1.6;
    double avoid_tol = 1e-3;   // relative keep-out radius around each avoid point
    int max_draws = 200000;
};

// Orbit q^k * c for |k| <= span, restricted to a sane magnitude band.  Used to
// build keep-out sets: singularities of the checked expressions live on
// q-power orbits of roots, zeros and the lattice points of the prefactors.
inline void append_orbit(std::vector<cd>& out, cd c, cd q, int span = 12) {
    if (std::abs(c) < 1e-14) {
        out.push_back(c);
        return;
    }
    cd up = c, dn = c;
    out.push_back(c);
    for (int k = 1; k <= span; ++k) {
        up *= q;
        dn /= q;
        if (std::abs(up) > 1e-4) out.push_back(up);
        if (std::abs(dn) < 1e4) out.push_back(dn);
    }
}

// Keep-out set shared by the identity checks: Bethe-root orbits, the zeros of
// the quasi-periodic combination, and the lattice of the infinite products
// (x = q^{-j}/xi and x = xi q^j, j >= 0).
inline std::vector<cd> standard_avoid_set(const ModelParams& p,
                                          const std::vector<cd>& roots,
                                          const std::vector<cd>& zeros) {
    std::vector<cd> avoid;
    for (cd r : roots) append_orbit(avoid, r, p.q);
    for (cd z : zeros) append_orbit(avoid, z, p.q);
    if (std::abs(p.xi) > 1e-14) {
        append_orbit(avoid, cd{1, 0} / p.xi, p.q);
        append_orbit(avoid, p.xi, p.q);
    }
    return avoid;
}

// Deterministic rejection sampler over an annulus r_lo <= |x| <= r_hi.
inline std::vector<cd> sample_probes(const ProbeOptions& opt,
                                     const std::vector<cd>& avoid,
                                     const std::function<bool(cd)>& extra_ok = nullptr) {
    std::mt19937_64 eng(opt.seed);
    std::vector<cd> out;
    out.reserve(static_cast<size_t>(opt.count));
    int draws = 0;
    while (static_cast<int>(out.size()) < opt.count) {
        if (++draws > opt.max_draws)
            throw ProbeAtPole("sample_probes: keep-out set too dense, no admissible probes");
        const double r = opt.r_lo + (opt.r_hi - opt.r_lo) * uniform01(eng);
        const double th = 2.0 * M_PI * uniform01(eng);
        const cd x{r * std::cos(th), r * std::sin(th)};
        bool ok = true;
        for (cd p : avoid) {
            if (std::abs(x - p) < opt.avoid_tol * std::max(1.0, std::abs(p))) {
                ok = false;
                break;
            }
        }
        if (ok && extra_ok && !extra_ok(x)) ok = false;
        if (ok) out.push_back(x);
    }
    return out;
}

} // namespace qbethe
