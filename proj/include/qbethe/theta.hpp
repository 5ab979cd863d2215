#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/hseries.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/pochhammer.hpp"
#include "qbethe/series.hpp"

namespace qbethe {

// Quantum Wronskian of the twin series:
//   Theta(x) = H'(x) H(x/q) - q^S (xi - x)^N (xi - q/x)^N H'(x/q) H(x),
// a Laurent series concentrated on a window of width ~2M around x^0.
inline LaurentSeries compute_theta(const ModelParams& p, const HPair& pair) {
    const LaurentSeries h = pair.h_series();
    const LaurentSeries hp_x = pair.hp_series_x();
    const cd qinv = cd{1, 0} / p.q;

    const LaurentSeries part_a = series_mul(hp_x, series_scale_arg(h, qinv));

    const Poly up = poly_binom_pow(p.xi, cd{-1, 0}, p.N);      // (xi - x)^N
    const Poly dn = poly_binom_pow(p.xi, -p.q, p.N);           // (xi - q u)^N in u = 1/x
    std::vector<cd> dn_rev(dn.rbegin(), dn.rend());
    LaurentSeries part_b = series_mul(LaurentSeries::polynomial(0, up),
                                      LaurentSeries::polynomial(-p.N, std::move(dn_rev)));
    part_b = series_mul(part_b, series_scale_arg(hp_x, qinv));
    part_b = series_mul(part_b, h);
    part_b = series_scale(part_b, ipow(p.q, p.S));

    return series_sub(part_a, part_b);
}

// Coefficient-wise residual of Theta(x) = omega (-x)^N Theta(qx), i.e.
// Theta_m = omega (-1)^N q^{m-N} Theta_{m-N}, relative to the largest entry.
inline double theta_qp_residual(const ModelParams& p, const LaurentSeries& theta) {
    const cd w = p.omega * ipow(cd{-1, 0}, p.N);
    const double scale = std::max(theta.max_abs(), 1e-300);
    double worst = 0.0;
    for (int m = theta.trust_lo + p.N; m <= theta.trust_hi; ++m) {
        const cd lhs = theta.at(m);
        const cd rhs = w * ipow(p.q, m - p.N) * theta.at(m - p.N);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst / scale;
}

struct ThetaData {
    LaurentSeries theta;
    std::vector<cd> zeros;          // N orbit representatives, product = 1/omega
    std::vector<int> orbit_shifts;  // q-power applied to each annulus representative
    cd theta0{0, 0};
    double qp_residual = 0.0;
};

namespace detail {

inline double theta_local_scale(const LaurentSeries& s, double ax) {
    double acc = 0.0;
    for (int m = s.trust_lo; m <= s.trust_hi; ++m)
        acc += std::abs(s.at(m)) * std::pow(ax, double(m));
    return acc;
}

inline cd polish_root(const LaurentSeries& s, cd z, int steps = 40) {
    for (int i = 0; i < steps; ++i) {
        const cd f = series_eval_checked(s, z).value;
        const cd df = series_eval_derivative(s, z);
        if (std::abs(df) == 0.0) break;
        const cd step = f / df;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        if (std::abs(step) > 0.5 * std::abs(z)) break;
        z -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    return z;
}

} // namespace detail

// Locate the zero orbits of Theta.  Roots of the trimmed Laurent window come
// from a companion-matrix eigenproblem (radius-rescaled so the coefficient
// profile is as flat as possible), get polished on the full series, are folded
// into the fundamental annulus sqrt|q| <= |z| < 1/sqrt|q|, clustered into
// q-orbits, and finally normalized so that prod z_k = 1/omega with the residual
// integer q-shift assigned to the largest representative.
inline ThetaData extract_zeros(const ModelParams& p, const LaurentSeries& theta) {
    ThetaData out;
    out.theta = theta;
    out.qp_residual = theta_qp_residual(p, theta);

    const double scale = theta.max_abs();
    if (!(scale > 0.0)) throw ZeroCountMismatch("extract_zeros: zero series");

    // Trim to the numerically meaningful window.
    constexpr double trim = 1e-30;
    int wlo = theta.trust_lo, whi = theta.trust_hi;
    while (wlo < whi && std::abs(theta.at(wlo)) < trim * scale) ++wlo;
    while (whi > wlo && std::abs(theta.at(whi)) < trim * scale) --whi;
    const int deg = whi - wlo;
    if (deg < p.N) throw ZeroCountMismatch("extract_zeros: window too narrow");

    // Flatten the coefficient profile with x = rho y (least-squares log slope).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int m = wlo; m <= whi; ++m) {
        const double am = std::abs(theta.at(m));
        if (am <= 0.0) continue;
        const double lm = std::log(am);
        sx += m; sy += lm; sxx += double(m) * m; sxy += double(m) * lm;
        ++cnt;
    }
    const double slope = cnt > 1 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
    const double rho = std::exp(-slope);

    Eigen::VectorXcd c(deg + 1);
    for (int m = wlo; m <= whi; ++m)
        c(m - wlo) = theta.at(m) * std::pow(rho, double(m)) / scale;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) companion(i, i - 1) = cd{1, 0};
    for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -c(i) / c(deg);
    const Eigen::VectorXcd raw = companion.eigenvalues();

    // Keep candidates within a couple of q-decades of the fundamental annulus.
    // Companion eigenvalues of the trimmed polynomial include noise-ring
    // artifacts near the trim radius; only candidates that actually polish
    // down to a vanishing Theta value survive.
    const double lq = std::log(std::abs(p.q));
    std::vector<cd> candidates;
    const auto consider = [&](cd seed) {
        const double as = std::abs(seed);
        if (!(as > 0.0) || !std::isfinite(as)) return;
        const double expnt = std::log(as) / lq;   // seed ~ |q|^expnt
        if (expnt < -2.2 || expnt > 2.2) return;
        const cd zp = detail::polish_root(theta, seed);
        const double loc = detail::theta_local_scale(theta, std::abs(zp));
        if (std::abs(series_eval_checked(theta, zp).value) > 1e-7 * loc) return;
        candidates.push_back(zp);
    };
    for (int i = 0; i < raw.size(); ++i) consider(raw(i) * rho);

    // The companion matrix of a window spanning ~30 decades is badly
    // conditioned (worse as |q| -> 1), so its eigenvalues can miss an orbit
    // entirely or land outside the Newton basin.  A fixed lattice of extra
    // Newton seeds across the fundamental annulus restores coverage; the
    // vanishing filter and orbit clustering absorb the duplicates.
    const double aq = std::abs(p.q);
    for (double re : {0.25, 0.0, -0.25}) {
        const double r = std::pow(aq, re);
        double phase = 0.17;
        for (int j = 0; j < 24; ++j) {
            consider(std::polar(r, 2.0 * M_PI * phase));
            phase += 0.3819660112501051;   // golden-angle step
        }
    }
    if (candidates.empty())
        throw ZeroCountMismatch("extract_zeros: no vanishing candidates near the annulus");

    // Fold into the annulus: pick k with |z q^k| in [sqrt|q|, 1/sqrt|q|).
    // In exponents of |q| (e = log|z|/log|q|, decreasing in |z|) that is
    // e + k in (-1/2, 1/2], i.e. k = floor(1/2 - e).
    std::vector<cd> folded;
    for (cd z : candidates) {
        const double e = std::log(std::abs(z)) / lq;
        const int k = static_cast<int>(std::floor(0.5 - e + 1e-9));
        folded.push_back(z * ipow(p.q, k));
    }
    std::vector<std::vector<cd>> orbits;
    for (cd z : folded) {
        bool placed = false;
        for (auto& orb : orbits) {
            for (int k = -1; k <= 1 && !placed; ++k)
                if (std::abs(orb.front() * ipow(p.q, k) - z) <=
                    1e-6 * std::max(1.0, std::abs(z)))
                    placed = true;
            if (placed) { orb.push_back(z); break; }
        }
        if (!placed) orbits.push_back({z});
    }
    if (static_cast<int>(orbits.size()) != p.N)
        throw ZeroCountMismatch("extract_zeros: found " + std::to_string(orbits.size()) +
                                " zero orbits, expected " + std::to_string(p.N));

    std::vector<cd> reps;
    for (auto& orb : orbits) {
        // members may straddle the annulus boundary; fold onto the first one
        cd acc{0, 0};
        for (cd z : orb) {
            cd best = z;
            double bd = std::abs(z - orb.front());
            for (int k = -1; k <= 1; ++k) {
                const cd cand = z * ipow(p.q, k);
                const double d = std::abs(cand - orb.front());
                if (d < bd) { bd = d; best = cand; }
            }
            acc += best;
        }
        reps.push_back(detail::polish_root(theta, acc / double(orb.size())));
    }
    std::sort(reps.begin(), reps.end(), [](cd a, cd b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        return std::arg(a) < std::arg(b);
    });

    // Simple-zero sanity at each representative.
    for (cd z : reps) {
        const double loc = detail::theta_local_scale(theta, std::abs(z));
        if (std::abs(series_eval_checked(theta, z).value) > 1e-7 * loc)
            throw ZeroCountMismatch("extract_zeros: candidate does not vanish");
        if (std::abs(series_eval_derivative(theta, z)) * std::abs(z) < 1e-6 * loc)
            throw ZeroCountMismatch("extract_zeros: zero is not simple");
    }

    // Normalize the product to 1/omega by a single integer q-shift.
    cd prod{1, 0};
    for (cd z : reps) prod *= z;
    const cd target = cd{1, 0} / p.omega;
    const cd r = target / prod;
    const double t0 = std::log(std::abs(r)) / lq;
    int best_T = 0;
    double best_err = kInf;
    for (int T = static_cast<int>(std::floor(t0)) - 1;
         T <= static_cast<int>(std::ceil(t0)) + 1; ++T) {
        const double err = std::abs(ipow(p.q, T) - r) / std::max(1e-300, std::abs(r));
        if (err < best_err) { best_err = err; best_T = T; }
    }
    if (best_err > 1e-8)
        throw NormalizationFailure("extract_zeros: zero product is not a q-shift of 1/omega "
                                   "(mismatch " + std::to_string(best_err) + ")");

    // Spread the residual shift as evenly as possible over the orbits (this
    // keeps conjugate pairs conjugate); any remainder lands on the largest
    // representatives, which the canonical order puts last.
    out.zeros = reps;
    const int n = static_cast<int>(reps.size());
    out.orbit_shifts.assign(reps.size(), 0);
    if (n > 0 && best_T != 0) {
        const int sign = best_T > 0 ? 1 : -1;
        const int base = best_T / n;
        int rem = best_T - base * n;   // same sign as best_T, |rem| < n
        for (int i = n - 1; i >= 0; --i) {
            int shift = base;
            if (rem != 0) { shift += sign; rem -= sign; }
            out.zeros[size_t(i)] *= ipow(p.q, shift);
            out.orbit_shifts[size_t(i)] = shift;
        }
    }

    // Overall constant from reference points on the unit circle (the geometric
    // center of the annulus), kept away from the zero orbits.
    std::vector<cd> t0s;
    double phase = 0.37;
    for (int j = 0; j < 5; ++j) {
        cd xref;
        bool ok = false;
        for (int tries = 0; tries < 64 && !ok; ++tries) {
            xref = std::polar(1.0, 2.0 * M_PI * phase);
            phase += 0.3819660112501051;   // golden-angle step
            ok = true;
            for (cd z : out.zeros)
                for (int k = -4; k <= 4; ++k)
                    if (std::abs(xref - z * ipow(p.q, k)) < 0.05) ok = false;
        }
        cd denom{1, 0};
        for (cd z : out.zeros) denom *= theta_factor(xref / z, p.q);
        if (std::abs(denom) == 0.0) continue;
        t0s.push_back(series_eval_checked(theta, xref).value / denom);
    }
    if (t0s.empty()) throw NormalizationFailure("extract_zeros: no usable reference point");
    double spread = 0.0, mag = 0.0;
    for (cd v : t0s) mag = std::max(mag, std::abs(v));
    for (size_t i = 1; i < t0s.size(); ++i) spread = std::max(spread, std::abs(t0s[i] - t0s[0]));
    if (spread > 1e-7 * std::max(1e-300, mag))
        throw NormalizationFailure("extract_zeros: reference-point values of Theta0 disagree");
    out.theta0 = t0s.front();
    return out;
}

inline ThetaData analyze_theta(const ModelParams& p, const HPair& pair) {
    return extract_zeros(p, compute_theta(p, pair));
}

} // namespace qbethe
