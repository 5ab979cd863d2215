// Finite and infinite q-shifted factorials and the multiplicative theta block.
#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace qbethe;
using Catch::Approx;
using testsupport::rel;

namespace {

cd brute_poch_inf(cd a, cd q, int K = 400) {
    cd acc{1, 0}, qk{1, 0};
    for (int k = 0; k < K; ++k) {
        acc *= (cd{1, 0} - a * qk);
        qk *= q;
    }
    return acc;
}

} // namespace

TEST_CASE("finite products at small orders") {
    const cd a{0.3, 0}, q{0.5, 0};
    REQUIRE(poch_finite(a, q, 0) == cd{1, 0});
    REQUIRE(std::abs(poch_finite(a, q, 1) - cd{0.7, 0}) <= 1e-15);
    REQUIRE(std::abs(poch_finite(a, q, -1) - cd{2.5, 0}) <= 1e-12);
}

TEST_CASE("finite products satisfy the index recurrence across zero") {
    const cd a{0.37, 0.21}, q{0.55, -0.1};
    for (int n = -8; n <= 8; ++n) {
        const cd lhs = poch_finite(a, q, n + 1);
        const cd rhs = poch_finite(a, q, n) * (cd{1, 0} - a * ipow(q, n));
        REQUIRE(rel(lhs, rhs) <= 1e-13);
    }
}

TEST_CASE("finite products split multiplicatively") {
    const cd a{0.42, -0.17}, q{0.6, 0.15};
    for (int n = -6; n <= 6; ++n) {
        for (int m = -6; m <= 6; ++m) {
            const cd lhs = poch_finite(a, q, n + m);
            const cd rhs = poch_finite(a, q, n) * poch_finite(a * ipow(q, n), q, m);
            REQUIRE(rel(lhs, rhs) <= 1e-12);
        }
    }
}

TEST_CASE("negative index on the pole lattice is reported") {
    const cd q{0.5, 0};
    REQUIRE_THROWS_AS(poch_finite(q, q, -1), PoleHit);          // factor 1 - q/q
    REQUIRE_THROWS_AS(poch_finite(ipow(q, 3), q, -4), PoleHit); // hits j = 3
}

TEST_CASE("infinite product against direct multiplication") {
    REQUIRE(std::abs(poch_inf(cd{0.5, 0}, cd{0.5, 0}) - cd{0.288788, 0}) <= 1e-6);
    std::mt19937_64 eng(123);
    for (int i = 0; i < 20; ++i) {
        const cd a = annulus_point(eng, 0.05, 2.0);
        const cd q = annulus_point(eng, 0.1, 0.8);
        REQUIRE(rel(poch_inf(a, q), brute_poch_inf(a, q)) <= 1e-13);
    }
    REQUIRE(poch_inf(cd{0, 0}, cd{0.5, 0}) == cd{1, 0});
    REQUIRE(poch_inf(cd{1, 0}, cd{0.5, 0}) == cd{0, 0});
}

TEST_CASE("infinite product satisfies its defining recurrence") {
    std::mt19937_64 eng(321);
    for (int i = 0; i < 20; ++i) {
        const cd a = annulus_point(eng, 0.05, 1.5);
        const cd q = annulus_point(eng, 0.1, 0.75);
        const cd lhs = poch_inf(a, q);
        const cd rhs = (cd{1, 0} - a) * poch_inf(a * q, q);
        REQUIRE(rel(lhs, rhs) <= 1e-12);
    }
}

TEST_CASE("region gates on the nome") {
    REQUIRE_THROWS_AS(poch_inf(cd{0.3, 0}, cd{1.1, 0}), RegionViolation);
    REQUIRE_THROWS_AS(poch_inf_series(cd{0.3, 0}, cd{1.0, 0}, 1, 16), RegionViolation);
    REQUIRE_THROWS_AS(poch_inf_series(cd{0.3, 0}, cd{0.5, 0}, 1, 0), RegionViolation);
    REQUIRE_THROWS_AS(poch_inf_series(cd{0.3, 0}, cd{0.5, 0}, 2, 16), RegionViolation);
}

TEST_CASE("series coefficients match the explicit q-exponential formula") {
    const cd a{0.45, 0.2}, q{0.5, -0.15};
    const LaurentSeries s = poch_inf_series(a, q, +1, 12);
    for (int m = 0; m < 12; ++m) {
        const cd expect = ipow(-a, m) * ipow(q, m * (m - 1) / 2) / poch_finite(q, q, m);
        REQUIRE(rel(s.at(m), expect) <= 1e-13);
    }
}

TEST_CASE("series evaluation matches the product pointwise") {
    const cd a{0.3, 0}, q{0.5, 0};
    const LaurentSeries up = poch_inf_series(a, q, +1, 64);
    for (double r : {0.1, 0.25, 0.4, 0.5}) {
        const cd x{r, 0.2 * r};
        REQUIRE(rel(series_eval(up, x), poch_inf(a * x, q)) <= 1e-10);
    }
    const LaurentSeries dn = poch_inf_series(a, q, -1, 64);
    for (double r : {2.0, 3.0, 5.0}) {
        const cd x{r, -0.3};
        REQUIRE(rel(series_eval(dn, x), poch_inf(a / x, q)) <= 1e-10);
    }
}

TEST_CASE("theta building block flips under a lattice shift") {
    const cd q{0.5, 0};
    for (cd w : {cd{0.7, 0.2}, cd{1.3, -0.4}, cd{0.9, 0}}) {
        const cd lhs = theta_factor(q * w, q);
        const cd rhs = -theta_factor(w, q) / w;
        REQUIRE(rel(lhs, rhs) <= 1e-12);
    }
    REQUIRE(theta_factor(cd{1, 0}, q) == cd{0, 0});
}
