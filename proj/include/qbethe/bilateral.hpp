#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/numeric.hpp"

namespace qbethe {

struct BilateralSum {
    cd value{0, 0};
    int K = 0;              // half-width actually used
    double tail_frac = 0.0; // worst of the last terms relative to the sum
};

struct BilateralOptions {
    int k_start = 40;
    int k_max = 320;
    double tail_rel = 1e-12;
    int tail_terms = 5;
};

namespace detail {

inline constexpr double kPoleTol = 1e-13;

struct TailWatch {
    double last[8];
    int n = 0;
    void push(double v) {
        for (int i = 7; i > 0; --i) last[i] = last[i - 1];
        last[0] = v;
        ++n;
    }
    // last `m` magnitudes non-increasing (outward) and below the threshold;
    // exact ties are fine (runs of zero terms).
    bool ok(int m, double thresh) const {
        if (n < m) return false;
        for (int i = 0; i < m; ++i) {
            if (last[i] > thresh) return false;
            if (i + 1 < m && last[i] > last[i + 1]) return false;
        }
        return true;
    }
};

// One sweep of the bilateral series
//   sum_n z^n f(y0 q^n) prod_k (A_k; q)_n / (B_k; q)_n
// summed n = 0..K upward then n = -1..-K downward, fixed association.
inline BilateralSum bilateral_sweep(const std::vector<cd>& A, const std::vector<cd>& B,
                                    cd z, cd q, cd y0, const std::function<cd(cd)>& f,
                                    int K, const BilateralOptions& opt) {
    const size_t nf = A.size();
    const cd qinv = cd{1, 0} / q;
    const cd zinv = cd{1, 0} / z;

    cd sum_up{0, 0}, sum_dn{0, 0};
    const cd t0 = f ? f(y0) : cd{1, 0};

    TailWatch up, dn;
    {   // upward: ratio picks up (1 - A q^n)/(1 - B q^n)
        cd R{1, 0}, zp{1, 0}, qn{1, 0}, y = y0;
        for (int n = 0; n < K; ++n) {
            cd num{1, 0}, den{1, 0};
            for (size_t k = 0; k < nf; ++k) {
                num *= (cd{1, 0} - A[k] * qn);
                den *= (cd{1, 0} - B[k] * qn);
            }
            if (std::abs(den) < kPoleTol)
                throw PoleHit("bilateral sum: pole in ascending terms at n = " + std::to_string(n));
            R *= num / den;
            zp *= z;
            qn *= q;
            y *= q;
            const cd term = zp * R * (f ? f(y) : cd{1, 0});
            if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
                throw NonConvergentTail("bilateral sum: ascending terms overflow, tails do not decay");
            sum_up += term;
            up.push(std::abs(term));
        }
    }
    {   // downward: ratio picks up (1 - B q^{n-1})/(1 - A q^{n-1})
        cd R{1, 0}, zm{1, 0}, qn = qinv, y = y0;
        for (int n = 0; n > -K; --n) {
            cd num{1, 0}, den{1, 0};
            for (size_t k = 0; k < nf; ++k) {
                num *= (cd{1, 0} - B[k] * qn);
                den *= (cd{1, 0} - A[k] * qn);
            }
            if (std::abs(den) < kPoleTol)
                throw PoleHit("bilateral sum: pole in descending terms at n = " + std::to_string(n - 1));
            R *= num / den;
            zm *= zinv;
            qn *= qinv;
            y *= qinv;
            const cd term = zm * R * (f ? f(y) : cd{1, 0});
            if (!std::isfinite(term.real()) || !std::isfinite(term.imag()))
                throw NonConvergentTail("bilateral sum: descending terms overflow, tails do not decay");
            sum_dn += term;
            dn.push(std::abs(term));
        }
    }

    BilateralSum out;
    out.value = t0 + sum_up + sum_dn;
    out.K = K;
    const double floor_scale = std::max(std::abs(out.value), 1e-100);
    const double thresh = opt.tail_rel * floor_scale;
    double worst = 0.0;
    for (int i = 0; i < std::min(opt.tail_terms, 8); ++i)
        worst = std::max({worst, up.last[i], dn.last[i]});
    out.tail_frac = worst / floor_scale;
    const bool certified = up.ok(opt.tail_terms, thresh) && dn.ok(opt.tail_terms, thresh);
    out.K = certified ? K : -K;   // sign flags certification for the caller
    return out;
}

} // namespace detail

// Bilateral series with certified tails; K doubles adaptively from
// opt.k_start until the last few terms on each side are decreasing and
// negligible against the partial sum, or the budget opt.k_max is exhausted.
inline BilateralSum bilateral_sum(const std::vector<cd>& A, const std::vector<cd>& B,
                                  cd z, cd q, cd y0, const std::function<cd(cd)>& f,
                                  const BilateralOptions& opt = {}) {
    if (A.size() != B.size())
        throw ConfigError("bilateral_sum: factor lists must have equal length");
    int K = opt.k_start;
    for (;;) {
        BilateralSum s = detail::bilateral_sweep(A, B, z, q, y0, f, K, opt);
        if (s.K > 0) return s;
        if (K >= opt.k_max) break;
        K = std::min(K * 2, opt.k_max);
    }
    throw NonConvergentTail("bilateral_sum: tails not certified within K <= " +
                            std::to_string(opt.k_max));
}

// Shared base resolution for probe-parameterized sums; both the bethe-ratio
// pathway and the generalized pathway must call this so their floating-point
// streams agree exactly.
inline void resolve_bases(cd x, const std::vector<cd>& a_list, const std::vector<cd>& b_list,
                          std::vector<cd>& A, std::vector<cd>& B) {
    A.resize(a_list.size());
    B.resize(b_list.size());
    for (size_t k = 0; k < a_list.size(); ++k) A[k] = x / a_list[k];
    for (size_t k = 0; k < b_list.size(); ++k) B[k] = x / b_list[k];
}

} // namespace qbethe
