// Shared helpers for the test suite: parameter anchors, random draws from the
// supported working box, and small numeric utilities.
#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "qbethe/qbethe.hpp"

namespace testsupport {

using qbethe::cd;

inline std::string data_file(const std::string& name) {
    return std::string(QBETHE_TEST_DATA_DIR) + "/" + name;
}

// Fixed parameter points used throughout the suite.
inline qbethe::ModelParams anchor(int N, int S, cd omega = cd{0.7, 0.0}) {
    qbethe::ModelParams p;
    p.q = cd{0.5, 0.0};
    p.xi = cd{0.3, 0.0};
    p.omega = omega;
    p.N = N;
    p.S = S;
    return p;
}

// Random parameters from the working box (|q| <= 0.7, |xi| <= 0.7,
// 0.1 <= |omega| <= 10), restricted so both convergence gates hold with some
// margin.  Every routine in the pipeline is then defined at the draw.
inline qbethe::ModelParams random_params(std::mt19937_64& eng, int N, int S,
                                         bool complex_entries = true) {
    const double two_pi = 6.283185307179586;
    for (;;) {
        qbethe::ModelParams p;
        const double aq = complex_entries ? qbethe::uniform_in(eng, 0.0, two_pi) : 0.0;
        const double ax = complex_entries ? qbethe::uniform_in(eng, 0.0, two_pi) : 0.0;
        const double aw = complex_entries ? qbethe::uniform_in(eng, 0.0, two_pi) : 0.0;
        p.q = std::polar(qbethe::uniform_in(eng, 0.3, 0.65), aq);
        p.xi = std::polar(qbethe::uniform_in(eng, 0.15, 0.55), ax);
        p.omega = std::polar(qbethe::uniform_in(eng, 0.35, 2.5), aw);
        p.N = N;
        p.S = S;
        if (std::abs(p.a()) < 0.8 && std::abs(p.a_dual()) < 0.8) return p;
    }
}

// Draws parameters until the Bethe solver converges; the solver can
// legitimately fail on unlucky draws (degenerate root sets), so retry.  The
// returned state carries its parameters.
inline qbethe::BetheState random_solved_state(std::mt19937_64& eng, int N, int S,
                                              int max_tries = 50) {
    for (int t = 0; t < max_tries; ++t) {
        qbethe::ModelParams p = random_params(eng, N, S);
        try {
            return qbethe::solve_bae(p);
        } catch (const qbethe::Error&) {
            continue;
        }
    }
    throw std::runtime_error("random_solved_state: no solvable draw found");
}

inline double rel(cd lhs, cd rhs) {
    return std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

} // namespace testsupport
