#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "qbethe/errors.hpp"
#include "qbethe/model.hpp"
#include "qbethe/numeric.hpp"
#include "qbethe/poly.hpp"

namespace qbethe {

// A solved magnon configuration together with the transfer-matrix polynomial
// it generates.
struct BetheState {
    ModelParams params;
    std::vector<cd> roots;   // S roots, canonically ordered
    Poly q_poly;             // Q(x) = prod (1 - x/x_k), constant term 1
    cd kappa{1, 0};          // leading coefficient of Q
    Poly t_poly;             // t(x), degree N
    double residual = 0.0;   // relative sup-norm of the Bethe equations

    cd q_eval(cd y) const { return poly_eval(q_poly, y); }
};

inline void canonical_root_order(std::vector<cd>& roots) {
    std::sort(roots.begin(), roots.end(), [](cd a, cd b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma < mb;
        const double aa = std::arg(a), ab = std::arg(b);
        if (aa != ab) return aa < ab;
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
}

namespace detail {

inline constexpr double kCoincidenceTol = 1e-6;

inline void check_distinct_roots(const ModelParams& p, const std::vector<cd>& roots) {
    for (size_t i = 0; i < roots.size(); ++i) {
        if (std::abs(roots[i]) < 1e-12)
            throw DegenerateRoots("root at the origin");
        for (size_t j = i + 1; j < roots.size(); ++j) {
            const double scale = std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
            if (std::abs(roots[i] - roots[j]) <= kCoincidenceTol * scale)
                throw DegenerateRoots("coincident Bethe roots");
            // q-power collisions break the bilateral-sum denominators later on.
            for (int k = -8; k <= 8; ++k) {
                if (k == 0) continue;
                const cd shifted = roots[j] * ipow(p.q, k);
                if (std::abs(roots[i] - shifted) <=
                    kCoincidenceTol * std::max(1.0, std::abs(roots[i])))
                    throw DegenerateRoots("Bethe roots related by a q-power shift");
            }
        }
    }
}

inline cd q_val(const std::vector<cd>& roots, cd y) {
    cd acc{1, 0};
    for (cd r : roots) acc *= (cd{1, 0} - y / r);
    return acc;
}

// partial derivative of Q(y) with respect to root k, y held fixed
inline cd q_partial(const std::vector<cd>& roots, cd y, size_t k) {
    cd acc = y / (roots[k] * roots[k]);
    for (size_t l = 0; l < roots.size(); ++l)
        if (l != k) acc *= (cd{1, 0} - y / roots[l]);
    return acc;
}

inline cd q_prime(const std::vector<cd>& roots, cd y) {
    cd acc{0, 0};
    for (size_t k = 0; k < roots.size(); ++k) {
        cd term = cd{-1, 0} / roots[k];
        for (size_t l = 0; l < roots.size(); ++l)
            if (l != k) term *= (cd{1, 0} - y / roots[l]);
        acc += term;
    }
    return acc;
}

struct BaeTerms {
    cd lhs, rhs;   // the two competing products in one Bethe equation
};

inline BaeTerms bae_terms(const ModelParams& p, const std::vector<cd>& roots, cd xj) {
    const cd A = ipow(cd{1, 0} - p.xi * xj, p.N);
    const cd B = p.omega * ipow(p.q, p.S) * ipow(p.xi - xj, p.N);
    return {A * q_val(roots, p.q * xj), B * q_val(roots, xj / p.q)};
}

} // namespace detail

// Raw residual vector of the Bethe equations at the given roots.
inline std::vector<cd> bae_residual(const ModelParams& p, const std::vector<cd>& roots) {
    p.validate();
    if (static_cast<int>(roots.size()) != p.S)
        throw ConfigError("bae_residual: expected " + std::to_string(p.S) + " roots");
    detail::check_distinct_roots(p, roots);
    std::vector<cd> res(roots.size());
    for (size_t j = 0; j < roots.size(); ++j) {
        const auto t = detail::bae_terms(p, roots, roots[j]);
        res[j] = t.lhs + t.rhs;
    }
    return res;
}

// Sup over equations of |residual| / max(1, |term|) — the convergence metric.
inline double bae_residual_rel(const ModelParams& p, const std::vector<cd>& roots) {
    double worst = 0.0;
    for (size_t j = 0; j < roots.size(); ++j) {
        const auto t = detail::bae_terms(p, roots, roots[j]);
        const double scale = std::max({1.0, std::abs(t.lhs), std::abs(t.rhs)});
        worst = std::max(worst, std::abs(t.lhs + t.rhs) / scale);
    }
    return worst;
}

struct NewtonOptions {
    int max_iterations = 200;
    double tolerance = 1e-10;
    int max_step_halvings = 30;
};

namespace detail {

inline double bae_residual_rel_nothrow(const ModelParams& p, const std::vector<cd>& roots) {
    double worst = 0.0;
    for (size_t j = 0; j < roots.size(); ++j) {
        const auto t = bae_terms(p, roots, roots[j]);
        const double scale = std::max({1.0, std::abs(t.lhs), std::abs(t.rhs)});
        worst = std::max(worst, std::abs(t.lhs + t.rhs) / scale);
    }
    return worst;
}

inline std::optional<std::vector<cd>> newton_solve(const ModelParams& p,
                                                   std::vector<cd> x,
                                                   const NewtonOptions& opt) {
    const int S = p.S;
    using Mat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<cd, Eigen::Dynamic, 1>;

    auto residual_vec = [&](const std::vector<cd>& r) -> std::optional<Vec> {
        for (cd v : r)
            if (!(std::abs(v) > 1e-10) || !std::isfinite(v.real()) || !std::isfinite(v.imag()))
                return std::nullopt;
        Vec F(S);
        for (int j = 0; j < S; ++j) {
            const auto t = bae_terms(p, r, r[static_cast<size_t>(j)]);
            F(j) = t.lhs + t.rhs;
        }
        return F;
    };

    auto maybeF = residual_vec(x);
    if (!maybeF) return std::nullopt;
    Vec F = *maybeF;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (bae_residual_rel_nothrow(p, x) < opt.tolerance) return x;

        Mat J(S, S);
        const cd w = p.omega * ipow(p.q, p.S);
        for (int j = 0; j < S; ++j) {
            const cd xj = x[static_cast<size_t>(j)];
            const cd A = ipow(cd{1, 0} - p.xi * xj, p.N);
            const cd B = w * ipow(p.xi - xj, p.N);
            const cd dA = -double(p.N) * p.xi * ipow(cd{1, 0} - p.xi * xj, p.N - 1);
            const cd dB = -double(p.N) * w * ipow(p.xi - xj, p.N - 1);
            for (int k = 0; k < S; ++k) {
                cd e = A * q_partial(x, p.q * xj, static_cast<size_t>(k)) +
                       B * q_partial(x, xj / p.q, static_cast<size_t>(k));
                if (k == j) {
                    e += dA * q_val(x, p.q * xj) + A * p.q * q_prime(x, p.q * xj);
                    e += dB * q_val(x, xj / p.q) + B * (cd{1, 0} / p.q) * q_prime(x, xj / p.q);
                }
                J(j, k) = e;
            }
        }

        const Vec step = J.colPivHouseholderQr().solve(-F);
        if (!step.allFinite()) return std::nullopt;

        double lambda = 1.0;
        bool accepted = false;
        const double f0 = F.norm();
        for (int h = 0; h < opt.max_step_halvings; ++h) {
            std::vector<cd> trial = x;
            for (int k = 0; k < S; ++k) trial[static_cast<size_t>(k)] += lambda * step(k);
            auto Ft = residual_vec(trial);
            if (Ft && Ft->norm() < f0) {
                x = std::move(trial);
                F = *Ft;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) return std::nullopt;
    }
    return bae_residual_rel_nothrow(p, x) < opt.tolerance ? std::optional(x) : std::nullopt;
}

} // namespace detail

// Assemble the full state (Q, kappa, t) from converged roots.  The transfer
// polynomial is the exact quotient
//   t(x) = [ (1-xi x)^N Q(qx) + omega q^S (xi-x)^N Q(x/q) ] / Q(x);
// a non-vanishing division remainder means the roots do not satisfy the Bethe
// equations, and the endpoint coefficients of t are pinned structurally.
inline BetheState build_t(const ModelParams& p, std::vector<cd> roots) {
    p.validate();
    if (static_cast<int>(roots.size()) != p.S)
        throw ConfigError("build_t: expected " + std::to_string(p.S) + " roots");
    detail::check_distinct_roots(p, roots);
    canonical_root_order(roots);

    Poly Q{cd{1, 0}};
    for (cd r : roots) Q = poly_mul(Q, Poly{cd{1, 0}, cd{-1, 0} / r});

    const Poly part1 = poly_mul(poly_binom_pow(cd{1, 0}, -p.xi, p.N), poly_scale_arg(Q, p.q));
    const Poly part2 = poly_scale(
        poly_mul(poly_binom_pow(p.xi, cd{-1, 0}, p.N), poly_scale_arg(Q, cd{1, 0} / p.q)),
        p.omega * ipow(p.q, p.S));
    const Poly numerator = poly_add(part1, part2);

    auto div = poly_div(numerator, Q);
    const double scale = std::max(1.0, poly_max_abs(numerator));
    if (poly_max_abs(div.remainder) > 1e-8 * scale)
        throw NonVanishingRemainder("build_t: transfer division remainder " +
                                    std::to_string(poly_max_abs(div.remainder) / scale) +
                                    " (roots do not satisfy the Bethe equations)");

    Poly t = std::move(div.quotient);
    t.resize(static_cast<size_t>(p.N + 1), cd{0, 0});
    const cd t0_expected = cd{1, 0} + p.a();
    const cd tN_expected = ipow(cd{-1, 0}, p.N) * (p.omega + ipow(p.q, p.S) * ipow(p.xi, p.N));
    if (std::abs(t[0] - t0_expected) > 1e-8 * std::max(1.0, std::abs(t0_expected)) ||
        std::abs(t[static_cast<size_t>(p.N)] - tN_expected) >
            1e-8 * std::max(1.0, std::abs(tN_expected)))
        throw StructureViolation("build_t: endpoint coefficients of t(x) are off");

    BetheState st;
    st.params = p;
    st.roots = std::move(roots);
    st.q_poly = std::move(Q);
    st.kappa = st.q_poly.back();
    st.t_poly = std::move(t);
    st.residual = st.params.S == 0 ? 0.0 : bae_residual_rel(p, st.roots);
    return st;
}

// Coefficient-wise residual of t(x) Q(x) = (1-xi x)^N Q(qx) + omega q^S (xi-x)^N Q(x/q),
// relative to the largest combined coefficient.
inline double resubstitution_residual(const BetheState& st) {
    const ModelParams& p = st.params;
    const Poly lhs = poly_mul(st.t_poly, st.q_poly);
    const Poly r1 = poly_mul(poly_binom_pow(cd{1, 0}, -p.xi, p.N), poly_scale_arg(st.q_poly, p.q));
    const Poly r2 = poly_scale(
        poly_mul(poly_binom_pow(p.xi, cd{-1, 0}, p.N), poly_scale_arg(st.q_poly, cd{1, 0} / p.q)),
        p.omega * ipow(p.q, p.S));
    const Poly rhs = poly_add(r1, r2);
    double scale = std::max({1.0, poly_max_abs(lhs), poly_max_abs(rhs)});
    double worst = 0.0;
    for (size_t i = 0; i < std::max(lhs.size(), rhs.size()); ++i) {
        const cd l = i < lhs.size() ? lhs[i] : cd{0, 0};
        const cd r = i < rhs.size() ? rhs[i] : cd{0, 0};
        worst = std::max(worst, std::abs(l - r));
    }
    return worst / scale;
}

struct SolveOptions {
    NewtonOptions newton{};
    int multistart_attempts = 64;
    uint64_t multistart_seed = 0x5eed0001u;
};

namespace detail {

inline std::vector<std::vector<cd>> seed_battery(const ModelParams& p,
                                                 const std::vector<std::vector<cd>>& user_seeds,
                                                 const SolveOptions& opt) {
    std::vector<std::vector<cd>> seeds;
    for (const auto& s : user_seeds)
        if (static_cast<int>(s.size()) == p.S) seeds.push_back(s);
    std::mt19937_64 eng(opt.multistart_seed);
    for (int a = 0; a < opt.multistart_attempts; ++a) {
        std::vector<cd> s(static_cast<size_t>(p.S));
        for (int k = 0; k < p.S; ++k) {
            // log-uniform radius over the 0.1 < |x| < 10 fallback annulus
            const double r = std::exp(uniform_in(eng, std::log(0.1), std::log(10.0)));
            const double phi = uniform_in(eng, 0.0, 2.0 * M_PI);
            s[static_cast<size_t>(k)] = cd{r * std::cos(phi), r * std::sin(phi)};
        }
        seeds.push_back(std::move(s));
    }
    return seeds;
}

} // namespace detail

// First converged, non-degenerate root set wins, in seed order (user seeds
// first, then the fixed-seed fallback battery).
inline BetheState solve_bae(const ModelParams& p,
                            const std::vector<std::vector<cd>>& user_seeds = {},
                            const SolveOptions& opt = {}) {
    p.validate();
    if (p.S == 0) return build_t(p, {});

    bool converged_any = false;
    for (const auto& seed : detail::seed_battery(p, user_seeds, opt)) {
        auto sol = detail::newton_solve(p, seed, opt.newton);
        if (!sol) continue;
        converged_any = true;
        try {
            return build_t(p, *sol);
        } catch (const DegenerateRoots&) {
            continue;
        }
    }
    if (converged_any)
        throw DegenerateRoots("solve_bae: every converged root set had coincident roots");
    throw RootFindFailure("solve_bae: no seed converged within the iteration budget");
}

// All distinct converged states reachable from the seed battery, canonically
// ordered; useful for enumerating branches.
inline std::vector<BetheState> solve_bae_multi(const ModelParams& p,
                                               const std::vector<std::vector<cd>>& user_seeds = {},
                                               const SolveOptions& opt = {},
                                               int max_states = 16) {
    p.validate();
    std::vector<BetheState> states;
    if (p.S == 0) {
        states.push_back(build_t(p, {}));
        return states;
    }
    auto same_roots = [](const std::vector<cd>& a, const std::vector<cd>& b) {
        for (size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-6 * std::max(1.0, std::abs(a[i]))) return false;
        return true;
    };
    for (const auto& seed : detail::seed_battery(p, user_seeds, opt)) {
        if (static_cast<int>(states.size()) >= max_states) break;
        auto sol = detail::newton_solve(p, seed, opt.newton);
        if (!sol) continue;
        std::vector<cd> roots = *sol;
        canonical_root_order(roots);
        bool dup = false;
        for (const auto& st : states)
            if (same_roots(st.roots, roots)) { dup = true; break; }
        if (dup) continue;
        try {
            states.push_back(build_t(p, roots));
        } catch (const DegenerateRoots&) {
            continue;
        }
    }
    std::sort(states.begin(), states.end(), [](const BetheState& a, const BetheState& b) {
        for (size_t i = 0; i < a.roots.size(); ++i) {
            const double ma = std::abs(a.roots[i]), mb = std::abs(b.roots[i]);
            if (ma != mb) return ma < mb;
            const double aa = std::arg(a.roots[i]), ab = std::arg(b.roots[i]);
            if (aa != ab) return aa < ab;
        }
        return false;
    });
    return states;
}

} // namespace qbethe
