#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qbethe/bethe.hpp"
#include "qbethe/bilateral.hpp"
#include "qbethe/errors.hpp"
#include "qbethe/hseries.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/pochhammer.hpp"
#include "qbethe/poly.hpp"
#include "qbethe/series.hpp"
#include "qbethe/theta.hpp"

namespace qbethe {

struct IdentitySample {
    cd probe{0, 0};
    cd lhs{0, 0};
    cd rhs{0, 0};
};

// Outcome of one identity check: worst relative residual over all probes /
// coefficients, plus enough per-point data to reproduce the verdict.
struct IdentityReport {
    std::string name;
    double tolerance = 0.0;
    double max_residual = 0.0;
    bool passed = false;
    std::vector<std::pair<cd, double>> residuals;  // probe (or index) -> residual
    std::vector<IdentitySample> samples;
    std::map<std::string, cd> context;
    std::vector<std::string> notes;
};

namespace detail {

inline void finalize_report(IdentityReport& r) {
    r.max_residual = 0.0;
    for (const auto& e : r.residuals) r.max_residual = std::max(r.max_residual, e.second);
    r.passed = !r.residuals.empty() && r.max_residual <= r.tolerance;
}

inline LaurentSeries series_pow_n(const LaurentSeries& s, int n) {
    LaurentSeries acc = s;
    for (int i = 1; i < n; ++i) acc = series_mul(acc, s);
    return acc;
}

// Max relative coefficient gap between two series over their common trusted
// window, normalised by the larger of 1 and the biggest coefficient seen.
inline double coeff_gap(const LaurentSeries& lhs, const LaurentSeries& rhs,
                        IdentityReport* rep = nullptr, int sample_count = 0) {
    const int lo = std::max(lhs.trust_lo, rhs.trust_lo);
    const int hi = std::min(lhs.trust_hi, rhs.trust_hi);
    if (lo > hi) throw EmptyTrustWindow("coeff_gap: no common trusted coefficients");
    double scale = 1.0;
    for (int m = lo; m <= hi; ++m)
        scale = std::max({scale, std::abs(lhs.at(m)), std::abs(rhs.at(m))});
    double worst = 0.0;
    for (int m = lo; m <= hi; ++m) {
        worst = std::max(worst, std::abs(lhs.at(m) - rhs.at(m)) / scale);
        if (rep && m - lo < sample_count)
            rep->samples.push_back({cd(m, 0), lhs.at(m), rhs.at(m)});
    }
    return worst;
}

} // namespace detail

// Weight 1 / (Q(y/q) Q(y)) attached to each bilateral term when the sum is
// specialised to a solved chain.
inline std::function<cd(cd)> bethe_weight(const BetheState& st) {
    return [Q = st.q_poly, q = st.params.q](cd y) {
        const cd qa = poly_eval(Q, y / q);
        const cd qb = poly_eval(Q, y);
        if (std::min(std::abs(qa), std::abs(qb)) < 1e-12)
            throw PoleHit("bethe_weight: probe orbit hits a Bethe root");
        return cd{1, 0} / (qa * qb);
    };
}

// One shared entry point for every probe-parameterised bilateral sum
//   psi(x) = sum_n z^n prod_k [(x/a_k; q)_n / (x/b_k; q)_n] f(q^n x);
// the specialised and generalised checks must both route through here so the
// two pathways produce identical floating-point values.
inline cd bilateral_psi(const std::vector<cd>& a_list, const std::vector<cd>& b_list,
                        cd z, cd q, cd x, const std::function<cd(cd)>& f,
                        const BilateralOptions& opt = {}) {
    std::vector<cd> A, B;
    resolve_bases(x, a_list, b_list, A, B);
    return bilateral_sum(A, B, z, q, x, f, opt).value;
}

// Coefficient-level cross relations between the power-series solutions and
// the Bethe polynomial.  Two lines:
//   (1)  H(x/q) Q(x) - w q^S (xi-x)^N H(x) Q(x/q)      = (1-a) (xi x; q)_inf^N
//   (2)  H'(u) Q*(qu) - q^S/w (xi-qu)^N H'(qu) Q*(u)   = kappa (1-a') (q xi u; q)_inf^N
// where u = 1/x, Q*(u) = u^S Q(1/u), a = w q^S xi^N and a' = a|_{w->1/w}.
inline IdentityReport hq_wronskian_check(const BetheState& st, const HPair& pair,
                                         double tol = 1e-8) {
    const ModelParams& p = st.params;
    IdentityReport rep;
    rep.name = "hq_wronskian";
    rep.tolerance = tol;
    rep.context["a"] = p.a();
    rep.context["a_dual"] = p.a_dual();
    rep.context["kappa"] = st.kappa;

    const int M = pair.M;
    const cd wqs = p.omega * ipow(p.q, p.S);

    {   // line 1, ascending powers of x
        LaurentSeries h = pair.h_series();
        LaurentSeries hq = series_scale_arg(h, cd{1, 0} / p.q);          // H(x/q)
        LaurentSeries Qs = LaurentSeries::polynomial(0, st.q_poly);
        LaurentSeries Qq = series_scale_arg(Qs, cd{1, 0} / p.q);         // Q(x/q)
        LaurentSeries xixN = LaurentSeries::polynomial(0, poly_binom_pow(p.xi, cd{-1, 0}, p.N));
        LaurentSeries lhs = series_sub(series_mul(hq, Qs),
                                       series_scale(series_mul(xixN, series_mul(h, Qq)), wqs));
        LaurentSeries rhs = series_scale(
            detail::series_pow_n(poch_inf_series(p.xi, p.q, 1, M + 1), p.N),
            cd{1, 0} - p.a());
        const double res = detail::coeff_gap(lhs, rhs, &rep, 3);
        rep.residuals.push_back({cd(1, 0), res});
        rep.notes.push_back("line 1: coefficients of H(x/q)Q(x) - w q^S (xi-x)^N H(x)Q(x/q)");
    }
    {   // line 2, ascending powers of u = 1/x
        std::vector<cd> qstar(static_cast<size_t>(p.S) + 1);
        for (int k = 0; k <= p.S; ++k) qstar[size_t(k)] = st.q_poly[size_t(p.S - k)];
        LaurentSeries Qs = LaurentSeries::polynomial(0, qstar);          // Q*(u)
        LaurentSeries Qq = series_scale_arg(Qs, p.q);                    // Q*(qu)
        LaurentSeries hp = pair.hp_series_u();
        LaurentSeries hpq = series_scale_arg(hp, p.q);                   // H'(x/q) in u
        LaurentSeries xiqN = LaurentSeries::polynomial(0, poly_binom_pow(p.xi, -p.q, p.N));
        LaurentSeries lhs = series_sub(series_mul(hp, Qq),
                                       series_scale(series_mul(xiqN, series_mul(hpq, Qs)),
                                                    ipow(p.q, p.S) / p.omega));
        LaurentSeries rhs = series_scale(
            detail::series_pow_n(poch_inf_series(p.q * p.xi, p.q, 1, M + 1), p.N),
            st.kappa * (cd{1, 0} - p.a_dual()));
        const double res = detail::coeff_gap(lhs, rhs, &rep, 3);
        rep.residuals.push_back({cd(2, 0), res});
        rep.notes.push_back("line 2: dual relation in u = 1/x against kappa (1-a') (q xi u; q)_inf^N");
    }
    detail::finalize_report(rep);
    return rep;
}

// Pointwise reconstruction of the Bethe polynomial from the series pair:
//   Q(x) = [(1-a)(xi x;q)_inf^N H'(x)
//           + kappa w (1-a') x^S (xi-x)^N (q xi/x;q)_inf^N H(x)] / Theta(x).
inline IdentityReport reconstruct_q(const BetheState& st, const HPair& pair,
                                    const ThetaData& th, const std::vector<cd>& probes,
                                    double tol = 1e-6) {
    const ModelParams& p = st.params;
    IdentityReport rep;
    rep.name = "q_reconstruction";
    rep.tolerance = tol;
    rep.context["kappa"] = st.kappa;

    const cd one{1, 0};
    const cd ca = one - p.a();
    const cd cb = st.kappa * p.omega * (one - p.a_dual());
    for (cd x : probes) {
        const cd theta_x = series_eval(th.theta, x);
        const double loc = detail::theta_local_scale(th.theta, std::abs(x));
        if (std::abs(theta_x) < 1e-10 * loc)
            throw ProbeAtPole("reconstruct_q: probe too close to a Theta zero");
        const cd num = ca * ipow(poch_inf(p.xi * x, p.q), p.N) * pair.hp_at(x) +
                       cb * ipow(x, p.S) * ipow(p.xi - x, p.N) *
                           ipow(poch_inf(p.q * p.xi / x, p.q), p.N) * pair.h_at(x);
        const cd lhs = st.q_eval(x);
        const cd rhs = num / theta_x;
        const double res = rel_residual(lhs, rhs);
        rep.residuals.push_back({x, res});
        if (rep.samples.size() < 4) rep.samples.push_back({x, lhs, rhs});
    }
    detail::finalize_report(rep);
    return rep;
}

// Consistency conditions on the Theta zeros z_k ("second" Bethe roots): the
// ratio
//   rho_k = - (xi z;q)_inf^N H'(z) / [z^S (xi-z)^N (q xi/z;q)_inf^N H(z)]
// must take one common value kappa' = kappa w (1-a')/(1-a) at every zero.
inline IdentityReport bae2_check(const BetheState& st, const HPair& pair,
                                 const ThetaData& th, double tol = 1e-6) {
    const ModelParams& p = st.params;
    IdentityReport rep;
    rep.name = "bae2";
    rep.tolerance = tol;

    const cd one{1, 0};
    std::vector<cd> rho;
    std::vector<cd> num_terms, den_terms;
    for (cd z : th.zeros) {
        const cd hz = pair.h_at(z);
        const cd hpz = pair.hp_at(z);
        const cd pxi = ipow(poch_inf(p.xi * z, p.q), p.N);
        const cd pqxi = ipow(poch_inf(p.q * p.xi / z, p.q), p.N);
        const cd shape = ipow(z, p.S) * ipow(p.xi - z, p.N);
        if (std::abs(hz) < 1e-10 || std::abs(pqxi) < 1e-10 || std::abs(shape) < 1e-12)
            throw ZeroDenominator("bae2_check: degenerate denominator at a Theta zero");
        num_terms.push_back(pxi * hpz);
        den_terms.push_back(shape * pqxi * hz);
        rho.push_back(-num_terms.back() / den_terms.back());
    }

    cd mean{0, 0};
    for (cd r : rho) mean += r;
    mean /= static_cast<double>(rho.size());
    double spread = 0.0;
    for (size_t j = 0; j < rho.size(); ++j)
        for (size_t k = j + 1; k < rho.size(); ++k)
            spread = std::max(spread,
                              std::abs(rho[j] - rho[k]) /
                                  std::max(std::abs(rho[j]), std::abs(rho[k])));
    const cd closed = st.kappa * p.omega * (one - p.a_dual()) / (one - p.a());
    const double closed_gap = std::abs(mean - closed) / std::max(1.0, std::abs(closed));

    for (size_t k = 0; k < rho.size(); ++k) {
        // plug the common value back into the defining relation at z_k
        const cd t1 = num_terms[k];
        const cd t2 = mean * den_terms[k];
        const double res = std::abs(t1 + t2) / std::max(std::abs(t1), std::abs(t2));
        rep.residuals.push_back({th.zeros[k], res});
        if (rep.samples.size() < 4) rep.samples.push_back({th.zeros[k], rho[k], closed});
    }
    rep.residuals.push_back({cd(0, 0), spread});
    rep.residuals.push_back({cd(0, 0), closed_gap});
    rep.context["kappa_prime_mean"] = mean;
    rep.context["kappa_prime_closed"] = closed;
    rep.context["pairwise_spread"] = cd(spread, 0);
    rep.context["closed_form_gap"] = cd(closed_gap, 0);
    rep.notes.push_back("rho_k spread across zeros, then gap to kappa w (1-a')/(1-a)");
    detail::finalize_report(rep);
    return rep;
}

// Bilateral sum specialised to a solved chain versus its product form:
//   sum_n a^n [(x/xi;q)_n/(xi x;q)_n]^N / (Q(q^{n-1}x) Q(q^n x))
//     = (q/x)^S Theta(x) / [kappa (1-a)(1-a') (xi x;q)_inf^N (q xi/x;q)_inf^N].
inline IdentityReport rr_check(const BetheState& st, const ThetaData& th,
                               const std::vector<cd>& probes,
                               const BilateralOptions& opt = {}, double tol = 1e-6) {
    const ModelParams& p = st.params;
    if (!p.gates_ok())
        throw NonConvergentTail("rr_check: tails diverge unless |w q^S xi^N| < 1 and |q^S xi^N / w| < 1");
    IdentityReport rep;
    rep.name = "bilateral_product";
    rep.tolerance = tol;

    const cd one{1, 0};
    const cd z = p.a();
    const cd cden = st.kappa * (one - p.a()) * (one - p.a_dual());
    if (std::abs(cden) < 1e-12)
        throw ZeroDenominator("rr_check: kappa (1-a)(1-a') vanishes");
    const std::vector<cd> a_list(static_cast<size_t>(p.N), p.xi);
    const std::vector<cd> b_list(static_cast<size_t>(p.N), one / p.xi);
    const std::function<cd(cd)> f = bethe_weight(st);

    rep.context["z"] = z;
    rep.context["kappa"] = st.kappa;
    rep.context["theta0"] = th.theta0;
    for (cd x : probes) {
        const cd lhs = bilateral_psi(a_list, b_list, z, p.q, x, f, opt);
        const cd pxi = ipow(poch_inf(p.xi * x, p.q), p.N);
        const cd pqxi = ipow(poch_inf(p.q * p.xi / x, p.q), p.N);
        if (std::min(std::abs(pxi), std::abs(pqxi)) < 1e-10)
            throw ProbeAtPole("rr_check: probe sits on a lattice zero of the product side");
        const cd rhs = ipow(p.q / x, p.S) * series_eval(th.theta, x) / (cden * pxi * pqxi);
        const double res = rel_residual(lhs, rhs);
        rep.residuals.push_back({x, res});
        if (rep.samples.size() < 4) rep.samples.push_back({x, lhs, rhs});
    }
    detail::finalize_report(rep);
    return rep;
}

// Classical bilateral summation: for |b/a| < |z| < 1,
//   sum_n (a;q)_n/(b;q)_n z^n
//     = (q, b/a, az, q/(az); q)_inf / (b, q/a, z, b/(az); q)_inf.
inline IdentityReport onepsi1_check(cd a, cd b, cd z, cd q,
                                    const BilateralOptions& opt = {}, double tol = 1e-8) {
    if (!(std::abs(q) < 1.0)) throw RegionViolation("onepsi1_check: |q| must be < 1");
    if (std::abs(a) < 1e-14 || std::abs(z) < 1e-14)
        throw RegionViolation("onepsi1_check: a and z must be nonzero");
    if (!(std::abs(b / a) < std::abs(z) && std::abs(z) < 1.0))
        throw RegionViolation("onepsi1_check: need |b/a| < |z| < 1");

    IdentityReport rep;
    rep.name = "bilateral_summation";
    rep.tolerance = tol;
    rep.context["a"] = a;
    rep.context["b"] = b;
    rep.context["z"] = z;
    rep.context["q"] = q;

    const cd lhs = bilateral_sum({a}, {b}, z, q, cd{1, 0}, nullptr, opt).value;
    const cd den = poch_inf(b, q) * poch_inf(q / a, q) * poch_inf(z, q) *
                   poch_inf(b / (a * z), q);
    if (std::abs(den) < 1e-12)
        throw ZeroDenominator("onepsi1_check: product-side denominator vanishes");
    const cd rhs = poch_inf(q, q) * poch_inf(b / a, q) * poch_inf(a * z, q) *
                   poch_inf(q / (a * z), q) / den;
    rep.residuals.push_back({z, rel_residual(lhs, rhs)});
    rep.samples.push_back({z, lhs, rhs});
    detail::finalize_report(rep);
    return rep;
}

// Functional-equation tests for the generalised weighted bilateral sum
//   psi(x) = sum_n z^n prod_k [(x/a_k;q)_n/(x/b_k;q)_n] f(q^n x):
//   (i)  psi(x) = z prod_k [(1 - x/a_k)/(1 - x/b_k)] psi(qx)
//   (ii) W(x) = z (-x)^N / prod_k a_k * W(qx),
//        W(x) = psi(x) prod_k (x/b_k;q)_inf (q a_k/x;q)_inf.
// Both hold for arbitrary weights f; samples record psi(x) so callers can
// compare pathways exactly.
inline IdentityReport rrgen_check(const std::vector<cd>& a_list, const std::vector<cd>& b_list,
                                  cd z, cd q, const std::function<cd(cd)>& f,
                                  const std::string& f_name, const std::vector<cd>& probes,
                                  const BilateralOptions& opt = {}, double tol = 1e-8) {
    if (a_list.size() != b_list.size())
        throw ConfigError("rrgen_check: parameter lists must have equal length");
    if (!(std::abs(q) < 1.0)) throw RegionViolation("rrgen_check: |q| must be < 1");
    if (!(std::abs(z) < 1.0))
        throw NonConvergentTail("rrgen_check: ascending terms diverge unless |z| < 1");
    for (cd c : a_list)
        if (std::abs(c) < 1e-14) throw ConfigError("rrgen_check: zero entry in a_list");
    for (cd c : b_list)
        if (std::abs(c) < 1e-14) throw ConfigError("rrgen_check: zero entry in b_list");

    IdentityReport rep;
    rep.name = "weighted_bilateral";
    rep.tolerance = tol;
    rep.context["z"] = z;
    rep.context["q"] = q;
    rep.notes.push_back("weight: " + f_name);

    const cd one{1, 0};
    cd prod_a = one;
    for (cd c : a_list) prod_a *= c;
    for (cd x : probes) {
        const cd psi_x = bilateral_psi(a_list, b_list, z, q, x, f, opt);
        const cd psi_qx = bilateral_psi(a_list, b_list, z, q, q * x, f, opt);

        cd ratio = one;           // prod (1 - x/a_k)/(1 - x/b_k)
        cd wprod = one;           // prod (x/b_k;q)_inf (q a_k/x;q)_inf
        cd wprod_q = one;         // the same product at qx
        for (size_t k = 0; k < a_list.size(); ++k) {
            const cd da = one - x / a_list[k];
            const cd db = one - x / b_list[k];
            if (std::min(std::abs(da), std::abs(db)) < 1e-12)
                throw ProbeAtPole("rrgen_check: probe on a parameter lattice point");
            ratio *= da / db;
            wprod *= poch_inf(x / b_list[k], q) * poch_inf(q * a_list[k] / x, q);
            wprod_q *= poch_inf(q * x / b_list[k], q) * poch_inf(a_list[k] / x, q);
        }
        const cd rhs_i = z * ratio * psi_qx;
        const double res_i =
            std::abs(psi_x - rhs_i) / std::max({1.0, std::abs(psi_x), std::abs(rhs_i)});

        const cd w_x = psi_x * wprod;
        const cd w_qx = psi_qx * wprod_q;
        const cd rhs_ii = z * ipow(-x, a_list.size()) / prod_a * w_qx;
        const double res_ii =
            std::abs(w_x - rhs_ii) / std::max({1.0, std::abs(w_x), std::abs(rhs_ii)});

        rep.residuals.push_back({x, std::max(res_i, res_ii)});
        rep.samples.push_back({x, psi_x, psi_qx});
    }
    detail::finalize_report(rep);
    return rep;
}

} // namespace qbethe
