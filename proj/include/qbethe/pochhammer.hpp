#pragma once

#include <cmath>

#include "qbethe/errors.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/series.hpp"

namespace qbethe {

// (a; q)_n for any integer n.  The n < 0 branch is the reciprocal product
// 1 / prod_{j=1..-n} (1 - a q^{-j}) and hits a pole when a lands on q^{j}.
inline cd poch_finite(cd a, cd q, int n) {
    if (n == 0) return cd{1, 0};
    if (n > 0) {
        cd acc{1, 0}, qk{1, 0};
        for (int k = 0; k < n; ++k) {
            acc *= (cd{1, 0} - a * qk);
            qk *= q;
        }
        return acc;
    }
    cd acc{1, 0};
    const cd qinv = cd{1, 0} / q;
    cd qmj{1, 0};
    for (int j = 1; j <= -n; ++j) {
        qmj *= qinv;
        const cd factor = cd{1, 0} - a * qmj;
        if (std::abs(factor) < 1e-14)
            throw PoleHit("poch_finite: vanishing factor at negative index");
        acc *= factor;
    }
    return cd{1, 0} / acc;
}

// (a; q)_inf truncated once |a q^k| drops below a fixed cutoff; the factor
// count is computed up-front from |a| and |q| so the result is deterministic.
inline cd poch_inf(cd a, cd q) {
    const double aq = std::abs(q);
    if (!(aq < 1.0)) throw RegionViolation("poch_inf: |q| must be < 1");
    const double aa = std::abs(a);
    if (aa == 0.0) return cd{1, 0};
    constexpr double cutoff = 1e-18;
    int K = 1;
    if (aq > 0.0) {
        const double k = (std::log(cutoff) - std::log(aa)) / std::log(aq);
        K = k <= 0.0 ? 1 : static_cast<int>(std::ceil(k)) + 1;
        K = std::min(K, 20000);
    }
    cd acc{1, 0}, qk{1, 0};
    for (int k = 0; k < K; ++k) {
        acc *= (cd{1, 0} - a * qk);
        qk *= q;
    }
    return acc;
}

// (a x^s; q)_inf as a series in x (s = +1) or in 1/x (s = -1), M coefficients.
// Coefficients follow from the q-exponential expansion
//   (a y; q)_inf = sum_m (-a)^m q^{m(m-1)/2} / (q; q)_m * y^m.
inline LaurentSeries poch_inf_series(cd a, cd q, int s, int M) {
    if (!(std::abs(q) < 1.0)) throw RegionViolation("poch_inf_series: |q| must be < 1");
    if (M < 1) throw RegionViolation("poch_inf_series: M must be >= 1");
    if (s != 1 && s != -1) throw RegionViolation("poch_inf_series: direction must be +1 or -1");

    std::vector<cd> p(static_cast<size_t>(M));
    p[0] = cd{1, 0};
    cd qm{1, 0};        // q^{m-1}
    cd qpow{1, 0};      // q^m accumulator for (1 - q^m)
    for (int m = 1; m < M; ++m) {
        qpow *= q;
        p[static_cast<size_t>(m)] =
            p[static_cast<size_t>(m - 1)] * (-a) * qm / (cd{1, 0} - qpow);
        qm *= q;
    }
    LaurentSeries out;
    if (s == 1) {
        out = LaurentSeries::truncated(0, std::move(p), false, true);
    } else {
        std::vector<cd> rev(p.rbegin(), p.rend());
        out = LaurentSeries::truncated(-(M - 1), std::move(rev), true, false);
    }
    return out;
}

// Multiplicative theta building block (w; q)_inf (q/w; q)_inf, whose zero set
// is exactly the q-orbit of w = 1.
inline cd theta_factor(cd w, cd q) {
    return poch_inf(w, q) * poch_inf(q / w, q);
}

} // namespace qbethe
