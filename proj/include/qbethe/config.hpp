#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "qbethe/bethe.hpp"
#include "qbethe/bilateral.hpp"
#include "qbethe/errors.hpp"
#include "qbethe/model.hpp"
#include "qbethe/probes.hpp"

namespace qbethe {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// Everything a run needs; fields mirror the JSON schema documented in the
// README.  One config drives one or many parameter points.
struct RunConfig {
    std::vector<ModelParams> points;
    int series_order = 160;
    ProbeOptions probe_opts;
    SolveOptions solve_opts;
    std::vector<std::vector<cd>> user_seeds;
    BilateralOptions bilateral;
    std::vector<std::string> checks = {"wronskian", "qrec", "bae2", "rr", "onepsi1", "rrgen"};
    double tol_wronskian = 1e-8;
    double tol_qrec = 1e-6;
    double tol_bae2 = 1e-6;
    double tol_rr = 1e-6;
    double tol_onepsi1 = 1e-8;
    double tol_rrgen = 1e-8;
    int workers = 1;
};

namespace detail {

// Complex values are either a plain number or a [re, im] pair.
inline cd parse_complex(const json& j, const std::string& where) {
    if (j.is_number()) return cd(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cd(j[0].get<double>(), j[1].get<double>());
    throw ConfigError(where + ": expected a number or [re, im] pair");
}

inline void reject_unknown(const json& j, const std::set<std::string>& known,
                           const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
}

inline ModelParams parse_params(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    reject_unknown(j, {"q", "xi", "omega", "N", "S"}, where);
    ModelParams p;
    if (j.contains("q")) p.q = parse_complex(j.at("q"), where + ".q");
    if (j.contains("xi")) p.xi = parse_complex(j.at("xi"), where + ".xi");
    if (j.contains("omega")) p.omega = parse_complex(j.at("omega"), where + ".omega");
    if (j.contains("N")) {
        if (!j.at("N").is_number_integer()) throw ConfigError(where + ".N: expected an integer");
        p.N = j.at("N").get<int>();
    }
    if (j.contains("S")) {
        if (!j.at("S").is_number_integer()) throw ConfigError(where + ".S: expected an integer");
        p.S = j.at("S").get<int>();
    }
    p.validate();
    return p;
}

inline int parse_int(const json& j, const std::string& where, int lo, int hi) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    const int v = j.get<int>();
    if (v < lo || v > hi)
        throw ConfigError(where + ": value " + std::to_string(v) + " outside [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return v;
}

inline double parse_positive(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!(v > 0)) throw ConfigError(where + ": must be positive");
    return v;
}

} // namespace detail

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    detail::reject_unknown(j,
                           {"params", "grid", "series_order", "probes", "solver", "bilateral",
                            "checks", "tolerances", "workers"},
                           "config");
    RunConfig cfg;

    const bool has_params = j.contains("params");
    const bool has_grid = j.contains("grid");
    if (has_params == has_grid)
        throw ConfigError("config: provide exactly one of \"params\" or \"grid\"");
    if (has_params) {
        cfg.points.push_back(detail::parse_params(j.at("params"), "params"));
    } else {
        const json& g = j.at("grid");
        if (!g.is_array() || g.empty())
            throw ConfigError("grid: expected a non-empty list of parameter objects");
        if (g.size() > 10000) throw ConfigError("grid: at most 10000 points");
        int i = 0;
        for (const auto& e : g)
            cfg.points.push_back(detail::parse_params(e, "grid[" + std::to_string(i++) + "]"));
    }

    if (j.contains("series_order"))
        cfg.series_order = detail::parse_int(j.at("series_order"), "series_order", 8, 4096);

    if (j.contains("probes")) {
        const json& p = j.at("probes");
        detail::reject_unknown(p, {"count", "seed", "r_lo", "r_hi", "avoid_tol"}, "probes");
        if (p.contains("count")) cfg.probe_opts.count = detail::parse_int(p.at("count"), "probes.count", 1, 10000);
        if (p.contains("seed")) {
            if (!p.at("seed").is_number_unsigned() && !p.at("seed").is_number_integer())
                throw ConfigError("probes.seed: expected an integer");
            cfg.probe_opts.seed = p.at("seed").get<std::uint64_t>();
        }
        if (p.contains("r_lo")) cfg.probe_opts.r_lo = detail::parse_positive(p.at("r_lo"), "probes.r_lo");
        if (p.contains("r_hi")) cfg.probe_opts.r_hi = detail::parse_positive(p.at("r_hi"), "probes.r_hi");
        if (p.contains("avoid_tol"))
            cfg.probe_opts.avoid_tol = detail::parse_positive(p.at("avoid_tol"), "probes.avoid_tol");
        if (!(cfg.probe_opts.r_lo < cfg.probe_opts.r_hi))
            throw ConfigError("probes: need r_lo < r_hi");
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        detail::reject_unknown(s, {"attempts", "seed", "seeds", "max_iterations", "tolerance"},
                               "solver");
        if (s.contains("attempts"))
            cfg.solve_opts.multistart_attempts =
                detail::parse_int(s.at("attempts"), "solver.attempts", 1, 100000);
        if (s.contains("seed")) {
            if (!s.at("seed").is_number_unsigned() && !s.at("seed").is_number_integer())
                throw ConfigError("solver.seed: expected an integer");
            cfg.solve_opts.multistart_seed = s.at("seed").get<std::uint64_t>();
        }
        if (s.contains("seeds")) {
            const json& ss = s.at("seeds");
            if (!ss.is_array()) throw ConfigError("solver.seeds: expected a list of root lists");
            for (const auto& lst : ss) {
                if (!lst.is_array()) throw ConfigError("solver.seeds: expected a list of root lists");
                std::vector<cd> v;
                for (const auto& e : lst) v.push_back(detail::parse_complex(e, "solver.seeds"));
                cfg.user_seeds.push_back(std::move(v));
            }
        }
        if (s.contains("max_iterations"))
            cfg.solve_opts.newton.max_iterations =
                detail::parse_int(s.at("max_iterations"), "solver.max_iterations", 1, 100000);
        if (s.contains("tolerance"))
            cfg.solve_opts.newton.tolerance = detail::parse_positive(s.at("tolerance"), "solver.tolerance");
    }

    if (j.contains("bilateral")) {
        const json& b = j.at("bilateral");
        detail::reject_unknown(b, {"k_start", "k_max", "tail_rel"}, "bilateral");
        if (b.contains("k_start"))
            cfg.bilateral.k_start = detail::parse_int(b.at("k_start"), "bilateral.k_start", 8, 100000);
        if (b.contains("k_max"))
            cfg.bilateral.k_max = detail::parse_int(b.at("k_max"), "bilateral.k_max", 8, 1000000);
        if (b.contains("tail_rel"))
            cfg.bilateral.tail_rel = detail::parse_positive(b.at("tail_rel"), "bilateral.tail_rel");
        if (cfg.bilateral.k_max < cfg.bilateral.k_start)
            throw ConfigError("bilateral: need k_max >= k_start");
    }

    if (j.contains("checks")) {
        const json& c = j.at("checks");
        if (!c.is_array() || c.empty()) throw ConfigError("checks: expected a non-empty list");
        const std::set<std::string> known = {"wronskian", "qrec", "bae2", "rr", "onepsi1", "rrgen"};
        cfg.checks.clear();
        for (const auto& e : c) {
            if (!e.is_string() || !known.count(e.get<std::string>()))
                throw ConfigError("checks: unknown check \"" + e.dump() + "\"");
            cfg.checks.push_back(e.get<std::string>());
        }
    }

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        detail::reject_unknown(t, {"wronskian", "qrec", "bae2", "rr", "onepsi1", "rrgen"},
                               "tolerances");
        if (t.contains("wronskian")) cfg.tol_wronskian = detail::parse_positive(t.at("wronskian"), "tolerances.wronskian");
        if (t.contains("qrec")) cfg.tol_qrec = detail::parse_positive(t.at("qrec"), "tolerances.qrec");
        if (t.contains("bae2")) cfg.tol_bae2 = detail::parse_positive(t.at("bae2"), "tolerances.bae2");
        if (t.contains("rr")) cfg.tol_rr = detail::parse_positive(t.at("rr"), "tolerances.rr");
        if (t.contains("onepsi1")) cfg.tol_onepsi1 = detail::parse_positive(t.at("onepsi1"), "tolerances.onepsi1");
        if (t.contains("rrgen")) cfg.tol_rrgen = detail::parse_positive(t.at("rrgen"), "tolerances.rrgen");
    }

    if (j.contains("workers"))
        cfg.workers = detail::parse_int(j.at("workers"), "workers", 1, 256);

    return cfg;
}

inline RunConfig read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

} // namespace qbethe
