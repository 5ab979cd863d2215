#pragma once

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/numeric.hpp"

namespace qbethe {

// Truncated Laurent series: coeffs[i] multiplies x^(lo+i).
//
// [trust_lo, trust_hi] is the sub-window whose coefficients are certified
// accurate (to working precision, relative to the series' overall scale) after
// whatever arithmetic produced the object.  tail_below / tail_above bound the
// magnitude of the unknown coefficients beyond the stored window on each side:
// 0 means "exactly zero beyond" (polynomial-like), +inf means "unknown".
struct LaurentSeries {
    int lo = 0;
    std::vector<cd> coeffs;
    int trust_lo = 0;
    int trust_hi = -1;
    double tail_below = 0.0;
    double tail_above = 0.0;

    int hi() const { return lo + static_cast<int>(coeffs.size()) - 1; }
    bool empty() const { return coeffs.empty(); }

    cd at(int power) const {
        if (power < lo || power > hi()) return cd{0.0, 0.0};
        return coeffs[static_cast<size_t>(power - lo)];
    }

    bool trusted(int power) const { return power >= trust_lo && power <= trust_hi; }

    double max_abs() const {
        double m = 0.0;
        for (const cd& c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    // Polynomial-style construction: every coefficient exact, nothing beyond.
    static LaurentSeries polynomial(int lo, std::vector<cd> c) {
        LaurentSeries s;
        s.lo = lo;
        s.coeffs = std::move(c);
        s.trust_lo = lo;
        s.trust_hi = s.hi();
        s.tail_below = 0.0;
        s.tail_above = 0.0;
        return s;
    }

    // Truncation of a series that continues beyond the given end(s); the tail
    // bound defaults to the magnitude of the last few stored coefficients.
    static LaurentSeries truncated(int lo, std::vector<cd> c,
                                   bool open_below, bool open_above) {
        LaurentSeries s = polynomial(lo, std::move(c));
        if (open_below) s.tail_below = edge_estimate(s.coeffs, /*from_back=*/false);
        if (open_above) s.tail_above = edge_estimate(s.coeffs, /*from_back=*/true);
        return s;
    }

    static double edge_estimate(const std::vector<cd>& c, bool from_back) {
        double m = 0.0;
        const size_t n = c.size();
        for (size_t k = 0; k < std::min<size_t>(3, n); ++k) {
            const size_t i = from_back ? n - 1 - k : k;
            m = std::max(m, std::abs(c[i]));
        }
        return m;
    }
};

namespace detail {

// Threshold for the magnitude route: coefficients are still certified when the
// combined unknown-tail contribution stays below this fraction of the result's
// largest coefficient.
inline constexpr double kTrustRel = 1e-13;

// Safety factor applied to tail products; the tails we meet decay at least
// geometrically, so a small constant covers the sum-vs-sup gap.
inline constexpr double kTailSafety = 4.0;

struct SeriesView {
    int lo, hi;                   // trusted window
    const std::vector<cd>* c;     // full stored coeffs
    int stored_lo;
    double tail_lo, tail_hi;      // effective bounds just outside [lo, hi]

    cd at(int power) const {
        const int idx = power - stored_lo;
        if (idx < 0 || idx >= static_cast<int>(c->size())) return cd{0, 0};
        return (*c)[static_cast<size_t>(idx)];
    }
    double abs_sum() const {
        double s = 0.0;
        for (int m = lo; m <= hi; ++m) s += std::abs(at(m));
        return s;
    }
};

// Restrict to the trusted window; coefficients stored outside it fold into the
// adjacent tail bound.
inline SeriesView view_of(const LaurentSeries& s) {
    if (s.trust_hi < s.trust_lo) throw EmptyTrustWindow("series has no trusted coefficients");
    SeriesView v{s.trust_lo, s.trust_hi, &s.coeffs, s.lo, s.tail_below, s.tail_above};
    for (int m = s.lo; m < s.trust_lo; ++m)
        v.tail_lo = std::max(v.tail_lo, std::abs(s.at(m)));
    for (int m = s.trust_hi + 1; m <= s.hi(); ++m)
        v.tail_hi = std::max(v.tail_hi, std::abs(s.at(m)));
    return v;
}

// Longest contiguous run of set flags; [1, 0] when none.
inline std::pair<int, int> longest_run(const std::vector<char>& ok, int base) {
    int best_lo = 1, best_hi = 0, cur = -1;
    for (int i = 0; i <= static_cast<int>(ok.size()); ++i) {
        const bool on = i < static_cast<int>(ok.size()) && ok[static_cast<size_t>(i)];
        if (on && cur < 0) cur = i;
        if (!on && cur >= 0) {
            if (i - cur > best_hi - best_lo + 1) { best_lo = base + cur; best_hi = base + i - 1; }
            cur = -1;
        }
    }
    return {best_lo, best_hi};
}

} // namespace detail

// Cauchy product with trust-window bookkeeping.
//
// The strict rule: an output coefficient is certified outright when no unknown
// input coefficient can reach it (which requires the partner side it pairs
// with to terminate).  On top of that, when the combined tail contribution is
// negligible against the result's scale, the whole stored window is certified;
// this is what lets opposite-sided series (one open above, one open below)
// multiply without losing everything.
inline LaurentSeries series_mul(const LaurentSeries& a, const LaurentSeries& b) {
    const detail::SeriesView va = detail::view_of(a);
    const detail::SeriesView vb = detail::view_of(b);

    LaurentSeries c;
    c.lo = va.lo + vb.lo;
    const int chi = va.hi + vb.hi;
    c.coeffs.assign(static_cast<size_t>(chi - c.lo + 1), cd{0, 0});
    for (int m = c.lo; m <= chi; ++m) {
        const int jlo = std::max(va.lo, m - vb.hi);
        const int jhi = std::min(va.hi, m - vb.lo);
        cd acc{0, 0};
        for (int j = jlo; j <= jhi; ++j) acc += va.at(j) * vb.at(m - j);
        c.coeffs[static_cast<size_t>(m - c.lo)] = acc;
    }

    const double sa = va.abs_sum();
    const double sb = vb.abs_sum();
    const double eb = detail::kTailSafety *
        ((va.tail_hi + va.tail_lo) * (sb + vb.tail_hi + vb.tail_lo) +
         (vb.tail_hi + vb.tail_lo) * sa);

    // Strict window.
    double upper = kInf, lower = -kInf;
    if (va.tail_hi > 0.0) upper = std::min(upper, vb.tail_lo == 0.0 ? double(va.hi + vb.lo) : -kInf);
    if (vb.tail_hi > 0.0) upper = std::min(upper, va.tail_lo == 0.0 ? double(vb.hi + va.lo) : -kInf);
    if (va.tail_lo > 0.0) lower = std::max(lower, vb.tail_hi == 0.0 ? double(va.lo + vb.hi) : kInf);
    if (vb.tail_lo > 0.0) lower = std::max(lower, va.tail_hi == 0.0 ? double(vb.lo + va.hi) : kInf);

    const double scale = c.max_abs();
    const bool tails_negligible = eb <= detail::kTrustRel * scale;
    if (tails_negligible) {
        c.trust_lo = c.lo;
        c.trust_hi = chi;
    } else {
        // compare before casting: the window bounds can be +-inf here, and a
        // float-to-int cast of an infinity is undefined
        const double tlo = std::max(lower, double(c.lo));
        const double thi = std::min(upper, double(chi));
        if (!(tlo <= thi))
            throw EmptyTrustWindow("series_mul: no certifiable coefficients (tail bound " +
                                   std::to_string(eb) + " vs scale " + std::to_string(scale) + ")");
        c.trust_lo = static_cast<int>(tlo);
        c.trust_hi = static_cast<int>(thi);
    }

    c.tail_above = (va.tail_hi == 0.0 && vb.tail_hi == 0.0)
        ? 0.0
        : std::max(eb, LaurentSeries::edge_estimate(c.coeffs, true));
    c.tail_below = (va.tail_lo == 0.0 && vb.tail_lo == 0.0)
        ? 0.0
        : std::max(eb, LaurentSeries::edge_estimate(c.coeffs, false));
    return c;
}

inline LaurentSeries series_lincomb(cd alpha, const LaurentSeries& a,
                                    cd beta, const LaurentSeries& b) {
    const detail::SeriesView va = detail::view_of(a);
    const detail::SeriesView vb = detail::view_of(b);
    LaurentSeries c;
    c.lo = std::min(va.lo, vb.lo);
    const int chi = std::max(va.hi, vb.hi);
    c.coeffs.assign(static_cast<size_t>(chi - c.lo + 1), cd{0, 0});

    const double aa = std::abs(alpha), ab = std::abs(beta);
    std::vector<char> ok(c.coeffs.size(), 0);
    std::vector<double> err(c.coeffs.size(), 0.0);
    for (int m = c.lo; m <= chi; ++m) {
        cd val = alpha * va.at(m) + beta * vb.at(m);
        double e = 0.0;
        if (m < va.lo) e += aa * va.tail_lo;
        if (m > va.hi) e += aa * va.tail_hi;
        if (m < vb.lo) e += ab * vb.tail_lo;
        if (m > vb.hi) e += ab * vb.tail_hi;
        c.coeffs[static_cast<size_t>(m - c.lo)] = val;
        err[static_cast<size_t>(m - c.lo)] = e;
    }
    const double scale = std::max(c.max_abs(), 1e-300);
    for (size_t i = 0; i < ok.size(); ++i)
        ok[i] = err[i] <= detail::kTrustRel * scale ? 1 : 0;
    auto [tlo, thi] = detail::longest_run(ok, c.lo);
    if (tlo > thi) throw EmptyTrustWindow("series_lincomb: no certifiable coefficients");
    c.trust_lo = tlo;
    c.trust_hi = thi;
    c.tail_below = aa * va.tail_lo + ab * vb.tail_lo;
    c.tail_above = aa * va.tail_hi + ab * vb.tail_hi;
    return c;
}

inline LaurentSeries series_add(const LaurentSeries& a, const LaurentSeries& b) {
    return series_lincomb(cd{1, 0}, a, cd{1, 0}, b);
}

inline LaurentSeries series_sub(const LaurentSeries& a, const LaurentSeries& b) {
    return series_lincomb(cd{1, 0}, a, cd{-1, 0}, b);
}

inline LaurentSeries series_scale(const LaurentSeries& a, cd k) {
    LaurentSeries c = a;
    for (cd& v : c.coeffs) v *= k;
    c.tail_below *= std::abs(k);
    c.tail_above *= std::abs(k);
    return c;
}

// Multiply by x^k.
inline LaurentSeries series_shift(const LaurentSeries& a, int k) {
    LaurentSeries c = a;
    c.lo += k;
    c.trust_lo += k;
    c.trust_hi += k;
    return c;
}

// Substitute x -> s*x (coefficient m picks up s^m).
inline LaurentSeries series_scale_arg(const LaurentSeries& a, cd s) {
    LaurentSeries c = a;
    const double as = std::abs(s);
    for (int m = c.lo; m <= c.hi(); ++m)
        c.coeffs[static_cast<size_t>(m - c.lo)] *= ipow(s, m);
    if (c.tail_above > 0.0 && c.tail_above < kInf)
        c.tail_above *= std::pow(as, double(c.hi() + 1));
    if (c.tail_below > 0.0 && c.tail_below < kInf)
        c.tail_below *= std::pow(as, double(c.lo - 1));
    return c;
}

// Substitute x -> 1/x (window and trust flip sign).
inline LaurentSeries series_invert_arg(const LaurentSeries& a) {
    LaurentSeries c;
    c.lo = -a.hi();
    c.coeffs.assign(a.coeffs.rbegin(), a.coeffs.rend());
    c.trust_lo = -a.trust_hi;
    c.trust_hi = -a.trust_lo;
    c.tail_below = a.tail_above;
    c.tail_above = a.tail_below;
    return c;
}

struct EvalResult {
    cd value{0, 0};
    double tail = 0.0;
};

namespace detail {

// Smallest magnitude whose ratio against a neighbour is still meaningful;
// denormal-range values carry rounding noise that fakes divergent tails.
inline constexpr double kEvalRatioFloor = 1e-300;

// Contribution of one side beyond the trusted window.  A zero tail bound
// means the side is exactly zero out there (closed); a finite bound caps the
// first unknown coefficient and is continued geometrically at the decay rate
// of the last resolvable coefficient pair; an unknown side (kInf) falls back
// to the pair-ratio estimate alone.
inline double eval_tail_one_side(const LaurentSeries& s, double ax, bool high) {
    const double tail_bound = high ? s.tail_above : s.tail_below;
    if (tail_bound == 0.0) return 0.0;

    const int t_edge = high ? s.trust_hi : s.trust_lo;
    const double r = high ? ax : 1.0 / ax;
    double rho = -1.0, c_edge = 0.0;
    const int step = high ? -1 : +1;
    for (int j = t_edge; high ? (j > s.trust_lo) : (j < s.trust_hi); j += step) {
        const double c1 = std::abs(s.at(j));
        const double c0 = std::abs(s.at(j + step));   // one step toward the interior
        if (c1 > kEvalRatioFloor && c0 > kEvalRatioFloor) {
            rho = (c1 / c0) * r;
            c_edge = c1 * std::pow(ax, double(j));
            break;
        }
    }
    const double rho_t = rho >= 0.0 ? rho : r;
    if (rho_t >= 0.95) return kInf;
    if (tail_bound == kInf)
        return rho < 0.0 ? kInf : c_edge * rho / (1.0 - rho);
    return tail_bound * std::pow(ax, double(t_edge) + (high ? 1.0 : -1.0)) / (1.0 - rho_t);
}

} // namespace detail

inline EvalResult series_eval_checked(const LaurentSeries& s, cd x) {
    if (s.trust_hi < s.trust_lo) throw EmptyTrustWindow("series_eval: no trusted coefficients");
    const double ax = std::abs(x);
    if (ax == 0.0) {
        for (int m = s.trust_lo; m < 0; ++m)
            if (std::abs(s.at(m)) > 0.0)
                throw UntrustedEvaluation("series_eval: negative powers at x = 0");
        if (s.trust_lo > 0) return {cd{0, 0}, 0.0};
        return {s.at(0), 0.0};
    }
    // Horner over the trusted window, highest power first.
    cd acc{0, 0};
    for (int m = s.trust_hi; m >= s.trust_lo; --m) acc = acc * x + s.at(m);
    acc *= ipow(x, s.trust_lo);

    double tail = detail::eval_tail_one_side(s, ax, true);
    tail += detail::eval_tail_one_side(s, ax, false);
    return {acc, tail};
}

inline cd series_eval(const LaurentSeries& s, cd x, double tail_tol = 1e-8) {
    const EvalResult r = series_eval_checked(s, x);
    if (!(r.tail <= tail_tol)) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "series_eval: tail estimate %.3e exceeds tolerance %.3e at |x| = %.6g",
                      r.tail, tail_tol, std::abs(x));
        throw UntrustedEvaluation(buf);
    }
    return r.value;
}

// d/dx over the trusted window (same tail caveats as series_eval).
inline cd series_eval_derivative(const LaurentSeries& s, cd x) {
    cd acc{0, 0};
    for (int m = s.trust_hi; m >= s.trust_lo; --m) {
        if (m == 0) continue;
        acc += double(m) * s.at(m) * ipow(x, m - 1);
    }
    return acc;
}

} // namespace qbethe
