#pragma once

#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/numeric.hpp"

namespace qbethe {

// Dense polynomials in ascending powers, coefficient type std::complex<double>.
using Poly = std::vector<cd>;

inline Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly c(a.size() + b.size() - 1, cd{0, 0});
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    return c;
}

inline Poly poly_add(const Poly& a, const Poly& b) {
    Poly c(std::max(a.size(), b.size()), cd{0, 0});
    for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
    for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
    return c;
}

inline Poly poly_scale(const Poly& a, cd k) {
    Poly c = a;
    for (cd& v : c) v *= k;
    return c;
}

// (c0 + c1 x)^n by repeated multiplication.
inline Poly poly_binom_pow(cd c0, cd c1, int n) {
    Poly acc{cd{1, 0}};
    const Poly lin{c0, c1};
    for (int i = 0; i < n; ++i) acc = poly_mul(acc, lin);
    return acc;
}

// p(s x).
inline Poly poly_scale_arg(const Poly& p, cd s) {
    Poly c = p;
    cd sk{1, 0};
    for (size_t i = 0; i < c.size(); ++i) {
        c[i] *= sk;
        sk *= s;
    }
    return c;
}

inline cd poly_eval(const Poly& p, cd x) {
    cd acc{0, 0};
    for (size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

inline double poly_max_abs(const Poly& p) {
    double m = 0.0;
    for (const cd& c : p) m = std::max(m, std::abs(c));
    return m;
}

struct PolyDivResult {
    Poly quotient;
    Poly remainder;
};

// Long division num = quot * den + rem with deg(rem) < deg(den).
inline PolyDivResult poly_div(const Poly& num, const Poly& den) {
    if (den.empty() || std::abs(den.back()) == 0.0)
        throw ZeroDenominator("poly_div: zero leading coefficient");
    Poly rem = num;
    const int dn = static_cast<int>(num.size()) - 1;
    const int dd = static_cast<int>(den.size()) - 1;
    if (dn < dd) return {Poly{}, rem};
    Poly quot(static_cast<size_t>(dn - dd + 1), cd{0, 0});
    for (int k = dn - dd; k >= 0; --k) {
        const cd c = rem[static_cast<size_t>(k + dd)] / den[static_cast<size_t>(dd)];
        quot[static_cast<size_t>(k)] = c;
        for (int j = 0; j <= dd; ++j)
            rem[static_cast<size_t>(k + j)] -= c * den[static_cast<size_t>(j)];
    }
    rem.resize(static_cast<size_t>(dd));
    return {std::move(quot), std::move(rem)};
}

} // namespace qbethe
