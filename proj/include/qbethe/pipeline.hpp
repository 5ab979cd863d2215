#pragma once

#include <array>
#include <cstdio>
#include <exception>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "qbethe/config.hpp"
#include "qbethe/identities.hpp"
#include "qbethe/probes.hpp"
#include "qbethe/report.hpp"

namespace qbethe {

struct PointResult {
    ModelParams params;
    BetheState state;
    HPair hpair;
    ThetaData theta;
    std::vector<cd> probes;
    std::vector<IdentityReport> reports;
    std::vector<std::string> errors;   // numerical failures recorded per point
    bool passed = true;
};

namespace detail {

// Deterministic admissible (a, b, z) draws for the classical summation check:
// z in a safe annulus, then b = a z u with |u| < 0.8 so |b/a| < |z| < 1.
inline std::vector<std::array<cd, 3>> onepsi1_draws(cd /*q*/, int count, std::uint64_t seed) {
    std::mt19937_64 eng(seed ^ 0x1f123bb5u);
    std::vector<std::array<cd, 3>> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        const cd z = annulus_point(eng, 0.35, 0.85);
        const cd a = annulus_point(eng, 0.5, 2.0);
        const cd u = annulus_point(eng, 0.05, 0.8);
        out.push_back({a, a * z * u, z});
    }
    return out;
}

} // namespace detail

// Runs one parameter point end to end.  Numerical failures (non-convergence,
// resonance, pole hits, ...) are recorded in `errors` instead of thrown, so a
// grid run always completes and reports every point.
inline PointResult run_point(const ModelParams& p, const RunConfig& cfg) {
    PointResult r;
    r.params = p;
    try {
        r.state = solve_bae(p, cfg.user_seeds, cfg.solve_opts);
        r.hpair = compute_hpair(p, r.state.t_poly, cfg.series_order);
        r.theta = analyze_theta(p, r.hpair);
        r.probes =
            sample_probes(cfg.probe_opts, standard_avoid_set(p, r.state.roots, r.theta.zeros));
    } catch (const Error& e) {
        r.errors.push_back(e.what());
        r.passed = false;
        return r;
    }

    for (const std::string& c : cfg.checks) {
        try {
            if (c == "wronskian") {
                r.reports.push_back(hq_wronskian_check(r.state, r.hpair, cfg.tol_wronskian));
            } else if (c == "qrec") {
                r.reports.push_back(
                    reconstruct_q(r.state, r.hpair, r.theta, r.probes, cfg.tol_qrec));
            } else if (c == "bae2") {
                r.reports.push_back(bae2_check(r.state, r.hpair, r.theta, cfg.tol_bae2));
            } else if (c == "rr") {
                r.reports.push_back(rr_check(r.state, r.theta, r.probes, cfg.bilateral, cfg.tol_rr));
            } else if (c == "onepsi1") {
                IdentityReport agg;
                agg.name = "bilateral_summation";
                agg.tolerance = cfg.tol_onepsi1;
                for (const auto& abz : detail::onepsi1_draws(p.q, cfg.probe_opts.count,
                                                             cfg.probe_opts.seed)) {
                    IdentityReport one =
                        onepsi1_check(abz[0], abz[1], abz[2], p.q, cfg.bilateral, cfg.tol_onepsi1);
                    agg.residuals.push_back(one.residuals.front());
                    if (agg.samples.size() < 4) agg.samples.push_back(one.samples.front());
                }
                detail::finalize_report(agg);
                r.reports.push_back(std::move(agg));
            } else if (c == "rrgen") {
                const std::vector<cd> a_list(static_cast<size_t>(p.N), p.xi);
                const std::vector<cd> b_list(static_cast<size_t>(p.N), cd{1, 0} / p.xi);
                r.reports.push_back(rrgen_check(a_list, b_list, p.a(), p.q, bethe_weight(r.state),
                                                "bethe", r.probes, cfg.bilateral, cfg.tol_rrgen));
            }
        } catch (const Error& e) {
            IdentityReport rep;
            rep.name = c;
            rep.tolerance = 0.0;
            rep.max_residual = kInf;
            rep.passed = false;
            rep.notes.push_back(e.what());
            r.reports.push_back(std::move(rep));
            r.errors.push_back(c + ": " + e.what());
        }
    }
    for (const auto& rep : r.reports) r.passed = r.passed && rep.passed;
    return r;
}

struct PipelineResult {
    std::vector<PointResult> points;
    bool passed = true;
};

// Points are independent; workers pick indices round-robin, so the result
// vector (and every downstream report byte) is identical for any worker count.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    PipelineResult out;
    const int n = static_cast<int>(cfg.points.size());
    out.points.resize(static_cast<size_t>(n));
    const int workers = std::max(1, std::min(cfg.workers, n));

    if (workers == 1) {
        for (int i = 0; i < n; ++i) out.points[size_t(i)] = run_point(cfg.points[size_t(i)], cfg);
    } else {
        std::vector<std::exception_ptr> errs(static_cast<size_t>(n));
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            pool.emplace_back([&, t]() {
                for (int i = t; i < n; i += workers) {
                    try {
                        out.points[size_t(i)] = run_point(cfg.points[size_t(i)], cfg);
                    } catch (...) {
                        errs[size_t(i)] = std::current_exception();
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        for (int i = 0; i < n; ++i)
            if (errs[size_t(i)]) std::rethrow_exception(errs[size_t(i)]);
    }
    for (const auto& pt : out.points) out.passed = out.passed && pt.passed;
    return out;
}

inline reportjs::ojson pipeline_json(const PipelineResult& res) {
    using reportjs::ojson;
    ojson j;
    j["tool"] = "qbethe";
    j["passed"] = res.passed;
    ojson pts = ojson::array();
    for (const auto& pt : res.points) {
        ojson e;
        e["params"] = reportjs::params_json(pt.params);
        e["state"] = reportjs::state_json(pt.state);
        e["series"] = {{"order", pt.hpair.M},
                       {"residual_h", pt.hpair.residual_h},
                       {"residual_hprime", pt.hpair.residual_hp}};
        e["theta"] = reportjs::theta_json(pt.theta);
        ojson checks = ojson::array();
        for (const auto& rep : pt.reports) checks.push_back(reportjs::report_json(rep));
        e["checks"] = checks;
        ojson errs = ojson::array();
        for (const auto& msg : pt.errors) errs.push_back(msg);
        e["errors"] = errs;
        e["passed"] = pt.passed;
        pts.push_back(e);
    }
    j["points"] = pts;
    return j;
}

// CSV dump of one series: power,re,im,trusted — one row per stored coefficient.
inline void emit_series_csv(const LaurentSeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "power,re,im,trusted\n";
    char buf[96];
    for (size_t i = 0; i < s.coeffs.size(); ++i) {
        const int m = s.lo + static_cast<int>(i);
        const int trusted = (m >= s.trust_lo && m <= s.trust_hi) ? 1 : 0;
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%d\n", m, s.coeffs[i].real(),
                      s.coeffs[i].imag(), trusted);
        out << buf;
    }
}

inline void emit_point_series(const PointResult& pt, const std::string& dir, int index) {
    const std::string stem = dir + "/point" + std::to_string(index);
    emit_series_csv(pt.hpair.h_series(), stem + "_h.csv");
    emit_series_csv(pt.hpair.hp_series_x(), stem + "_hprime.csv");
    emit_series_csv(pt.theta.theta, stem + "_theta.csv");
    emit_series_csv(LaurentSeries::polynomial(0, pt.state.q_poly), stem + "_q.csv");
    emit_series_csv(LaurentSeries::polynomial(0, pt.state.t_poly), stem + "_t.csv");
}

} // namespace qbethe
