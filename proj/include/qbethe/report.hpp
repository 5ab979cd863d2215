#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "qbethe/bethe.hpp"
#include "qbethe/hseries.hpp"
#include "qbethe/identities.hpp"
#include "qbethe/model.hpp"
#include "qbethe/theta.hpp"

namespace qbethe {

// All report JSON uses ordered_json with insertion-ordered keys, so identical
// inputs serialize to identical bytes.
namespace reportjs {

using ojson = nlohmann::ordered_json;

inline ojson complex_json(cd v) { return ojson::array({v.real(), v.imag()}); }

inline ojson complex_list(const std::vector<cd>& v) {
    ojson out = ojson::array();
    for (cd c : v) out.push_back(complex_json(c));
    return out;
}

inline ojson params_json(const ModelParams& p) {
    ojson j;
    j["q"] = complex_json(p.q);
    j["xi"] = complex_json(p.xi);
    j["omega"] = complex_json(p.omega);
    j["N"] = p.N;
    j["S"] = p.S;
    return j;
}

inline ojson state_json(const BetheState& st) {
    ojson j;
    j["roots"] = complex_list(st.roots);
    j["t_poly"] = complex_list(st.t_poly);
    j["kappa"] = complex_json(st.kappa);
    j["residual"] = st.residual;
    return j;
}

inline ojson theta_json(const ThetaData& th) {
    ojson j;
    j["zeros"] = complex_list(th.zeros);
    j["orbit_shifts"] = th.orbit_shifts;
    j["theta0"] = complex_json(th.theta0);
    j["qp_residual"] = th.qp_residual;
    return j;
}

inline ojson report_json(const IdentityReport& r) {
    ojson j;
    j["name"] = r.name;
    j["tolerance"] = r.tolerance;
    j["max_residual"] = r.max_residual;
    j["passed"] = r.passed;
    ojson res = ojson::array();
    for (const auto& e : r.residuals) {
        ojson row;
        row["probe"] = complex_json(e.first);
        row["residual"] = e.second;
        res.push_back(row);
    }
    j["residuals"] = res;
    ojson samp = ojson::array();
    for (const auto& s : r.samples) {
        ojson row;
        row["probe"] = complex_json(s.probe);
        row["lhs"] = complex_json(s.lhs);
        row["rhs"] = complex_json(s.rhs);
        samp.push_back(row);
    }
    j["samples"] = samp;
    ojson ctx;
    for (const auto& kv : r.context) ctx[kv.first] = complex_json(kv.second);
    j["context"] = ctx;
    j["notes"] = r.notes;
    return j;
}

} // namespace reportjs

// One line per check, machine-grep friendly:  PASS  name  max=…  tol=…
inline std::string summary_line(const IdentityReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s  %-22s max_residual=%.3e  tol=%.1e",
                  r.passed ? "PASS" : "FAIL", r.name.c_str(), r.max_residual, r.tolerance);
    return std::string(buf);
}

} // namespace qbethe
