#pragma once

#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/poly.hpp"
#include "qbethe/series.hpp"

namespace qbethe {

// gamma(x) = omega q^S (1 - xi x)^N (xi - q x)^N, the weight in front of the
// H(qx) term; degree 2N, constant term omega q^S xi^N.
inline Poly gamma_poly(const ModelParams& p) {
    Poly g = poly_mul(poly_binom_pow(cd{1, 0}, -p.xi, p.N),
                      poly_binom_pow(p.xi, -p.q, p.N));
    return poly_scale(g, p.omega * ipow(p.q, p.S));
}

// t'(x) = t(x) / (omega (-x)^N) re-read as a polynomial in u = 1/x:
// t'_k = (-1)^N t_{N-k} / omega.
inline Poly mirror_t(const Poly& t, const ModelParams& p) {
    Poly tp(static_cast<size_t>(p.N + 1), cd{0, 0});
    const cd sgn = ipow(cd{-1, 0}, p.N) / p.omega;
    for (int k = 0; k <= p.N; ++k) {
        const cd tNk = static_cast<size_t>(p.N - k) < t.size()
                           ? t[static_cast<size_t>(p.N - k)] : cd{0, 0};
        tp[static_cast<size_t>(k)] = sgn * tNk;
    }
    return tp;
}

namespace detail {

// Shared coefficient recursion behind both series: solves
//   t(y) H(y) = H(y/q) + g(y) H(qy),  H = 1 + h_1 y + ...,
// which pins   D_m h_m = sum_{j>=1} (t_j - g_j q^{m-j}) h_{m-j},
//              D_m = (1 - q^m)(q^{-m} - g_0),
// requiring the structural identity t_0 = 1 + g_0.
inline std::vector<cd> th_recursion(const Poly& t, const Poly& g, cd q, int M) {
    if (t.empty() || g.empty())
        throw StructureViolation("th_recursion: empty coefficient polynomials");
    const cd g0 = g[0];
    if (std::abs(t[0] - (cd{1, 0} + g0)) > 1e-10 * std::max(1.0, std::abs(t[0])))
        throw StructureViolation("th_recursion: t_0 != 1 + gamma_0");

    std::vector<cd> h(static_cast<size_t>(M + 1), cd{0, 0});
    h[0] = cd{1, 0};
    const double guard = 1e-8 * (1.0 + std::abs(g0));
    cd qm{1, 0};          // q^m
    cd qminv{1, 0};       // q^{-m}
    const cd qi = cd{1, 0} / q;
    for (int m = 1; m <= M; ++m) {
        qm *= q;
        qminv *= qi;
        const cd D = (cd{1, 0} - qm) * (qminv - g0);
        if (std::abs(D) < guard)
            throw Resonance("th_recursion: resonant denominator at order " + std::to_string(m));
        cd rhs{0, 0};
        const int jmax = std::min<int>(m, static_cast<int>(g.size()) - 1);
        for (int j = 1; j <= jmax; ++j) {
            const cd tj = static_cast<size_t>(j) < t.size() ? t[static_cast<size_t>(j)] : cd{0, 0};
            rhs += (tj - g[static_cast<size_t>(j)] * ipow(q, m - j)) * h[static_cast<size_t>(m - j)];
        }
        h[static_cast<size_t>(m)] = rhs / D;
    }
    return h;
}

// Max coefficient residual of t(y)H(y) - H(y/q) - g(y)H(qy) over orders
// 0..M, relative to the largest combined coefficient.
inline double th_residual(const Poly& t, const Poly& g, cd q, const std::vector<cd>& h) {
    const int M = static_cast<int>(h.size()) - 1;
    double worst = 0.0, scale = 0.0;
    for (int m = 0; m <= M; ++m) {
        cd th{0, 0};
        for (int j = 0; j <= std::min<int>(m, static_cast<int>(t.size()) - 1); ++j)
            th += t[static_cast<size_t>(j)] * h[static_cast<size_t>(m - j)];
        const cd hq = ipow(q, -m) * h[static_cast<size_t>(m)];
        cd gh{0, 0};
        for (int j = 0; j <= std::min<int>(m, static_cast<int>(g.size()) - 1); ++j)
            gh += g[static_cast<size_t>(j)] * ipow(q, m - j) * h[static_cast<size_t>(m - j)];
        worst = std::max(worst, std::abs(th - hq - gh));
        scale = std::max({scale, std::abs(th), std::abs(hq), std::abs(gh)});
    }
    return worst / std::max(scale, 1e-300);
}

} // namespace detail

// Ascending coefficients of H(x) = 1 + h_1 x + ... + h_M x^M.
inline std::vector<cd> compute_h(const ModelParams& p, const Poly& t, int M) {
    p.validate();
    return detail::th_recursion(t, gamma_poly(p), p.q, M);
}

// Coefficients of H'(x) = 1 + h'_1/x + ... in ascending powers of 1/x.  The
// defining relation maps onto the H recursion under omega -> 1/omega with the
// mirrored transfer coefficients, so the same core solves it.
inline std::vector<cd> compute_hprime(const ModelParams& p, const Poly& t, int M) {
    p.validate();
    const ModelParams pd = p.dual();
    return detail::th_recursion(mirror_t(t, p), gamma_poly(pd), p.q, M);
}

// The twin series for one model point, plus their defining-equation residuals.
struct HPair {
    ModelParams params;
    Poly t_poly;
    int M = 0;
    std::vector<cd> h;    // H(x), powers 0..M of x
    std::vector<cd> hp;   // H'(x), powers 0..M of 1/x
    double residual_h = 0.0;
    double residual_hp = 0.0;

    LaurentSeries h_series() const {
        return LaurentSeries::truncated(0, h, false, true);
    }
    // H'(x) as a Laurent series in x (powers -M..0).
    LaurentSeries hp_series_x() const {
        std::vector<cd> rev(hp.rbegin(), hp.rend());
        return LaurentSeries::truncated(-M, std::move(rev), true, false);
    }
    // H'(x) in the variable u = 1/x (ascending powers).
    LaurentSeries hp_series_u() const {
        return LaurentSeries::truncated(0, hp, false, true);
    }
    cd h_at(cd x, double tol = 1e-8) const { return series_eval(h_series(), x, tol); }
    cd hp_at(cd x, double tol = 1e-8) const { return series_eval(hp_series_u(), cd{1, 0} / x, tol); }

    // Radius up to which the truncated H evaluates with tail estimate < tol,
    // from the decay rate of the last resolved coefficients.
    double certified_radius(double tol = 1e-10) const {
        int j = M;
        while (j > 1 && (std::abs(h[size_t(j)]) == 0.0 || std::abs(h[size_t(j - 1)]) == 0.0)) --j;
        if (j <= 1) return kInf;
        const double ratio = std::abs(h[size_t(j)]) / std::abs(h[size_t(j - 1)]);
        if (ratio == 0.0) return kInf;
        // |h_j| r^j * rho/(1-rho) ~ tol with rho = ratio * r; solve crudely for r.
        double r = 1.0 / ratio;
        while (r > 1e-3 && std::abs(h[size_t(j)]) * std::pow(r, j) * std::min(1.0, ratio * r) /
                   std::max(1e-12, 1.0 - std::min(0.95, ratio * r)) > tol)
            r *= 0.9;
        return r;
    }
};

inline HPair compute_hpair(const ModelParams& p, const Poly& t, int M) {
    HPair hp;
    hp.params = p;
    hp.t_poly = t;
    hp.M = M;
    hp.h = compute_h(p, t, M);
    hp.hp = compute_hprime(p, t, M);
    hp.residual_h = detail::th_residual(t, gamma_poly(p), p.q, hp.h);
    hp.residual_hp = detail::th_residual(mirror_t(t, p), gamma_poly(p.dual()), p.q, hp.hp);
    return hp;
}

struct MatrixProductResult {
    cd ratio;        // H(x/q)/H(x), or H'(qx)/H'(x) for the primed product
    cd off_diagonal; // -> -omega q^S xi^N, or its omega -> 1/omega mirror
    int steps = 0;
};

struct MatrixProductOptions {
    int max_steps = 256;           // defaults to 4*M at the call sites
    double step_tol = 1e-12;
    int stable_steps = 5;
};

// Semi-infinite ordered product of 2x2 transfer factors
//   L(x) = [[t(x), -gamma(x)], [1, 0]],   P_K = L(x) L(qx) ... L(q^{K-1} x).
// The product collapses to rank one, giving an independent route to the
// H-series ratios: P[0][0]/P[1][0] -> H(x/q)/H(x), P[0][1]/P[0][0] -> -g_0.
// The primed variant multiplies L'(x/q^k) from the left with
//   L'(x) = [[t'(x), 1], [-gamma'(x), 0]]
// and converges to H'(qx)/H'(x) via P[0][0]/P[0][1], P[1][0]/P[0][0] -> -g'_0.
inline MatrixProductResult matrix_product_oracle(const ModelParams& p, const Poly& t, cd x0,
                                                 bool primed = false,
                                                 const MatrixProductOptions& opt = {}) {
    p.validate();
    if (!p.gates_ok())
        throw NonConvergentProduct("matrix_product_oracle: convergence gate |omega^{+-1} q^S xi^N| < 1 violated");

    const ModelParams pe = primed ? p.dual() : p;
    const Poly te = primed ? mirror_t(t, p) : t;
    const Poly ge = gamma_poly(pe);

    cd P[2][2] = {{cd{1, 0}, cd{0, 0}}, {cd{0, 0}, cd{1, 0}}};
    cd arg = primed ? cd{1, 0} / x0 : x0;   // evaluate in u = 1/x for the primed line
    const cd argq = pe.q;

    cd prev_ratio{0, 0};
    cd prev_off{0, 0};
    int stable = 0;
    for (int k = 0; k < opt.max_steps; ++k) {
        const cd tv = poly_eval(te, arg);
        const cd gv = poly_eval(ge, arg);
        // both products reduce to the same 2x2 recursion on (row, column) data
        cd L[2][2] = {{tv, -gv}, {cd{1, 0}, cd{0, 0}}};
        cd R[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                R[i][j] = P[i][0] * L[0][j] + P[i][1] * L[1][j];
        double norm = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) norm = std::max(norm, std::abs(R[i][j]));
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw NonConvergentProduct("matrix_product_oracle: product degenerated");
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) P[i][j] = R[i][j] / norm;
        arg *= argq;

        if (std::abs(P[1][0]) > 0.0) {
            const cd ratio = P[0][0] / P[1][0];
            const cd off = std::abs(P[0][0]) > 0.0 ? P[0][1] / P[0][0] : cd{0, 0};
            // the off-diagonal ratio trails the main one (it still sees the
            // shrinking argument directly), so both must settle before we stop
            if (std::abs(ratio - prev_ratio) < opt.step_tol * std::max(1.0, std::abs(ratio)) &&
                std::abs(off - prev_off) < opt.step_tol * std::max(1.0, std::abs(off))) {
                if (++stable >= opt.stable_steps)
                    return {ratio, off, k + 1};
            } else {
                stable = 0;
            }
            prev_ratio = ratio;
            prev_off = off;
        }
    }
    throw NonConvergentProduct("matrix_product_oracle: no convergence within step budget");
}

} // namespace qbethe
