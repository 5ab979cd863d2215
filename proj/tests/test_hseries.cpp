// Twin series solutions of the deformed transfer relation, their mirrored
// construction, and the independent matrix-product route to their ratios.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

#include "support.hpp"

using namespace qbethe;
using testsupport::anchor;
using testsupport::random_params;
using testsupport::random_solved_state;
using testsupport::rel;

TEST_CASE("gamma weight polynomial: degree, constant term, pointwise values") {
    for (int N = 1; N <= 3; ++N) {
        ModelParams p = anchor(N, 1);
        const Poly g = gamma_poly(p);
        REQUIRE(g.size() == static_cast<size_t>(2 * N + 1));
        REQUIRE(rel(g[0], p.a()) <= 1e-15);
        for (int i = 0; i < 5; ++i) {
            const cd x{0.1 + 0.17 * i, 0.07 * i};
            const cd want = p.omega * ipow(p.q, p.S) * ipow(cd{1, 0} - p.xi * x, p.N) *
                            ipow(p.xi - p.q * x, p.N);
            REQUIRE(rel(poly_eval(g, x), want) <= 1e-13);
        }
    }
}

TEST_CASE("mirrored transfer coefficients invert the argument") {
    std::mt19937_64 eng(8201);
    for (int trial = 0; trial < 4; ++trial) {
        const BetheState st = random_solved_state(eng, 1 + trial % 3, 1 + trial % 2);
        const ModelParams& p = st.params;
        const Poly tp = mirror_t(st.t_poly, p);
        REQUIRE(tp.size() == st.t_poly.size());
        for (int i = 0; i < 5; ++i) {
            const cd u{0.2 + 0.15 * i, -0.05 * i};
            const cd want = ipow(cd{-1, 0}, p.N) * ipow(u, p.N) *
                            poly_eval(st.t_poly, cd{1, 0} / u) / p.omega;
            REQUIRE(rel(poly_eval(tp, u), want) <= 1e-12);
        }
        // mirroring twice (second time with the dual twist) is the identity
        const Poly back = mirror_t(tp, p.dual());
        for (size_t k = 0; k < back.size(); ++k)
            REQUIRE(rel(back[k], st.t_poly[k]) <= 1e-14);
    }
}

TEST_CASE("series coefficients satisfy the defining relation") {
    std::mt19937_64 eng(8202);
    for (int trial = 0; trial < 12; ++trial) {
        const int N = 1 + trial % 3;
        const int S = trial % 3;
        BetheState st;
        if (S == 0) {
            st = solve_bae(random_params(eng, N, 0));
        } else {
            st = random_solved_state(eng, N, S);
        }
        const HPair hp = compute_hpair(st.params, st.t_poly, 64);
        CAPTURE(trial, N, S);
        REQUIRE(hp.residual_h < 1e-9);
        REQUIRE(hp.residual_hp < 1e-9);
    }
}

TEST_CASE("pointwise functional equations hold inside the trust radius") {
    for (auto [N, S] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{3, 0}}) {
        const BetheState st = solve_bae(anchor(N, S, S == 1 && N == 2 ? cd{0.49, 0} : cd{0.7, 0}));
        const ModelParams& p = st.params;
        const HPair hp = compute_hpair(p, st.t_poly, 160);
        const Poly g = gamma_poly(p);
        for (int i = 0; i < 6; ++i) {
            const cd x = cd{0.05 + 0.08 * i, 0.03} * std::exp(cd{0, 0.7 * i});
            const cd lhs = poly_eval(st.t_poly, x) * hp.h_at(x);
            const cd rhs = hp.h_at(x / p.q) + poly_eval(g, x) * hp.h_at(p.q * x);
            REQUIRE(rel(lhs, rhs) <= 1e-9);
        }
        // primed line, written in u = 1/x
        const Poly tp = mirror_t(st.t_poly, p);
        const Poly gp = gamma_poly(p.dual());
        const LaurentSeries hpu = hp.hp_series_u();
        for (int i = 0; i < 6; ++i) {
            const cd u = cd{0.05 + 0.08 * i, -0.02} * std::exp(cd{0, 0.9 * i});
            const cd lhs = poly_eval(tp, u) * series_eval(hpu, u);
            const cd rhs = series_eval(hpu, u / p.q) + poly_eval(gp, u) * series_eval(hpu, p.q * u);
            REQUIRE(rel(lhs, rhs) <= 1e-9);
        }
    }
}

TEST_CASE("matrix product converges to the series ratios") {
    const BetheState st = solve_bae(anchor(1, 1));
    const ModelParams& p = st.params;
    const HPair hp = compute_hpair(p, st.t_poly, 160);

    const cd x0{0.34, 0.11};
    const MatrixProductResult mp = matrix_product_oracle(p, st.t_poly, x0);
    REQUIRE(mp.steps > 0);
    REQUIRE(rel(mp.ratio, hp.h_at(x0 / p.q) / hp.h_at(x0)) <= 1e-9);
    REQUIRE(rel(mp.off_diagonal, -p.a()) <= 1e-9);

    const cd x1{2.6, -0.8};
    const MatrixProductResult mpp = matrix_product_oracle(p, st.t_poly, x1, true);
    REQUIRE(rel(mpp.ratio, hp.hp_at(p.q * x1) / hp.hp_at(x1)) <= 1e-9);
    REQUIRE(rel(mpp.off_diagonal, -p.a_dual()) <= 1e-9);
}

TEST_CASE("primed series is the plain recursion run on the mirrored data") {
    std::mt19937_64 eng(8203);
    const BetheState st = random_solved_state(eng, 2, 1);
    const std::vector<cd> hp1 = compute_hprime(st.params, st.t_poly, 48);
    const std::vector<cd> hp2 = compute_h(st.params.dual(), mirror_t(st.t_poly, st.params), 48);
    REQUIRE(hp1.size() == hp2.size());
    for (size_t m = 0; m < hp1.size(); ++m)
        REQUIRE(std::memcmp(&hp1[m], &hp2[m], sizeof(cd)) == 0);
}

TEST_CASE("longer runs extend shorter ones without recomputation drift") {
    const BetheState st = solve_bae(anchor(2, 1, cd{0.49, 0}));
    const std::vector<cd> h32 = compute_h(st.params, st.t_poly, 32);
    const std::vector<cd> h64 = compute_h(st.params, st.t_poly, 64);
    REQUIRE(h32.size() == 33);
    for (size_t m = 0; m < h32.size(); ++m)
        REQUIRE(std::memcmp(&h32[m], &h64[m], sizeof(cd)) == 0);
}

TEST_CASE("anchor residuals and certified radius") {
    const BetheState st = solve_bae(anchor(1, 1));
    const HPair hp = compute_hpair(st.params, st.t_poly, 128);
    REQUIRE(hp.residual_h <= 1e-12);
    REQUIRE(hp.residual_hp <= 1e-12);
    REQUIRE(hp.certified_radius() > 0.3);
}

TEST_CASE("convergence gate violations are reported") {
    ModelParams p = anchor(1, 0, cd{5.0, 0});   // |omega xi| = 1.5 > 1
    const BetheState st = solve_bae(p);
    REQUIRE_THROWS_AS(matrix_product_oracle(p, st.t_poly, cd{0.3, 0}), NonConvergentProduct);
}

TEST_CASE("resonant parameter combinations are reported") {
    ModelParams p;
    p.q = cd{0.5, 0};
    p.xi = cd{0.5, 0};
    p.omega = cd{4.0, 0};
    p.N = 1;
    p.S = 0;
    const BetheState st = solve_bae(p);   // omega xi = 2 = 1/q: first denominator vanishes
    REQUIRE_THROWS_AS(compute_h(p, st.t_poly, 8), Resonance);
}

TEST_CASE("structural mismatch between t and gamma is reported") {
    REQUIRE_THROWS_AS(detail::th_recursion({cd{1.5, 0}}, {cd{0.2, 0}}, cd{0.5, 0}, 4),
                      StructureViolation);
    REQUIRE_THROWS_AS(detail::th_recursion({}, {cd{0.2, 0}}, cd{0.5, 0}, 4), StructureViolation);
}
