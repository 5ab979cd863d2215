#pragma once

#include <cmath>
#include <string>

#include "qbethe/errors.hpp"
#include "qbethe/numeric.hpp"

namespace qbethe {

// Parameter pack for the twisted inhomogeneous spin chain: anisotropy q,
// inhomogeneity xi, twist omega, N sites, S magnons.
struct ModelParams {
    cd q{0.5, 0.0};
    cd xi{0.3, 0.0};
    cd omega{0.7, 0.0};
    int N = 1;
    int S = 0;

    // omega q^S xi^N; the twist weight that controls every convergence gate.
    cd a() const { return omega * ipow(q, S) * ipow(xi, N); }
    // q^S xi^N / omega; its mirror under omega -> 1/omega.
    cd a_dual() const { return ipow(q, S) * ipow(xi, N) / omega; }

    void validate() const {
        if (!(std::abs(q) > 0.0) || !(std::abs(q) < 1.0))
            throw ConfigError("params.q: need 0 < |q| < 1, got |q| = " + std::to_string(std::abs(q)));
        if (!(std::abs(xi) < 1.0))
            throw ConfigError("params.xi: need |xi| < 1, got |xi| = " + std::to_string(std::abs(xi)));
        if (!(std::abs(omega) > 0.0))
            throw ConfigError("params.omega: need omega != 0");
        if (N < 1) throw ConfigError("params.N: need N >= 1");
        if (S < 0) throw ConfigError("params.S: need S >= 0");
    }

    // Both bilateral sums and the semi-infinite matrix products require these.
    bool gates_ok() const {
        return std::abs(a()) < 1.0 && std::abs(a_dual()) < 1.0;
    }

    ModelParams dual() const {
        ModelParams p = *this;
        p.omega = cd{1, 0} / omega;
        return p;
    }
};

} // namespace qbethe
