// Command-line front end: solve Bethe systems, verify series/theta structure,
// and check the bilateral-sum identities, driven by a JSON config.
//
// Exit codes: 0 all checks passed, 1 at least one check failed,
//             2 bad config/usage, 3 numerical failure.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qbethe/qbethe.hpp"

namespace {

using namespace qbethe;

void write_json(const reportjs::ojson& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << j.dump(2) << '\n';
}

std::string fmt_cd(cd v) {
    char buf[64];
    if (v.imag() == 0.0)
        std::snprintf(buf, sizeof(buf), "%.10g", v.real());
    else
        std::snprintf(buf, sizeof(buf), "%.10g%+.10gi", v.real(), v.imag());
    return std::string(buf);
}

void print_point_header(int i, const ModelParams& p) {
    std::printf("point %d: q=%s xi=%s omega=%s N=%d S=%d\n", i, fmt_cd(p.q).c_str(),
                fmt_cd(p.xi).c_str(), fmt_cd(p.omega).c_str(), p.N, p.S);
}

int do_solve(const RunConfig& cfg, const std::string& out_path) {
    reportjs::ojson pts = reportjs::ojson::array();
    for (size_t i = 0; i < cfg.points.size(); ++i) {
        const ModelParams& p = cfg.points[i];
        BetheState st = solve_bae(p, cfg.user_seeds, cfg.solve_opts);
        print_point_header(static_cast<int>(i), p);
        std::printf("  roots:");
        for (cd r : st.roots) std::printf(" %s", fmt_cd(r).c_str());
        std::printf("\n  kappa=%s residual=%.3e\n", fmt_cd(st.kappa).c_str(), st.residual);
        reportjs::ojson e;
        e["params"] = reportjs::params_json(p);
        e["state"] = reportjs::state_json(st);
        pts.push_back(e);
    }
    if (!out_path.empty()) {
        reportjs::ojson j;
        j["tool"] = "qbethe";
        j["points"] = pts;
        write_json(j, out_path);
    }
    return 0;
}

int do_run(const RunConfig& cfg, const std::string& out_path) {
    PipelineResult res = run_pipeline(cfg);
    int failures = 0;
    bool numerical = false;
    for (size_t i = 0; i < res.points.size(); ++i) {
        print_point_header(static_cast<int>(i), res.points[i].params);
        for (const auto& rep : res.points[i].reports) {
            std::printf("  %s\n", summary_line(rep).c_str());
            if (!rep.passed) ++failures;
        }
        for (const auto& msg : res.points[i].errors) {
            std::printf("  error: %s\n", msg.c_str());
            numerical = true;
        }
    }
    if (res.passed)
        std::printf("all checks passed\n");
    else
        std::printf("%d check(s) failed\n", std::max(failures, 1));
    if (!out_path.empty()) write_json(pipeline_json(res), out_path);
    if (numerical) return 3;
    return res.passed ? 0 : 1;
}

int do_emit(const RunConfig& cfg, const std::string& out_dir) {
    if (out_dir.empty()) throw ConfigError("emit: --out DIR is required");
    if (cfg.points.size() != 1)
        throw ConfigError("emit: config must describe a single parameter point");
    RunConfig quiet = cfg;
    quiet.checks.clear();   // emit needs the series and theta, not the checks
    PipelineResult res = run_pipeline(quiet);
    if (!res.points[0].errors.empty()) throw Error(res.points[0].errors.front());
    emit_point_series(res.points[0], out_dir, 0);
    std::printf("wrote %s/point0_{h,hprime,theta,q,t}.csv\n", out_dir.c_str());
    return 0;
}

std::vector<std::string> intersect_checks(const std::vector<std::string>& enabled,
                                          const std::vector<std::string>& wanted) {
    std::vector<std::string> out;
    for (const auto& c : wanted)
        if (std::find(enabled.begin(), enabled.end(), c) != enabled.end()) out.push_back(c);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bethe-system solver and q-series identity verifier"};
    app.require_subcommand(1);

    std::string config_path, out_path, check_name;
    int workers = 0;

    CLI::App* solve = app.add_subcommand("solve", "solve the Bethe system, print roots and t(x)");
    CLI::App* verify =
        app.add_subcommand("verify", "run the series-level structure checks (wronskian, qrec, bae2)");
    CLI::App* identity =
        app.add_subcommand("identity", "run the bilateral-sum checks (rr, onepsi1, rrgen)");
    CLI::App* emit = app.add_subcommand("emit", "write the computed series as CSV files");

    for (CLI::App* sub : {solve, verify, identity, emit}) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_path,
                        sub == emit ? "output directory" : "write a JSON report here");
    }
    for (CLI::App* sub : {verify, identity})
        sub->add_option("--workers", workers, "worker threads over grid points");
    identity->add_option("--check", check_name, "restrict to one check: rr | onepsi1 | rrgen");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        qbethe::RunConfig cfg = qbethe::read_config(config_path);
        if (workers > 0) cfg.workers = workers;

        if (solve->parsed()) return do_solve(cfg, out_path);
        if (verify->parsed()) {
            cfg.checks = intersect_checks(cfg.checks, {"wronskian", "qrec", "bae2"});
            if (cfg.checks.empty())
                throw qbethe::ConfigError("verify: all structure checks disabled by config");
            return do_run(cfg, out_path);
        }
        if (identity->parsed()) {
            std::vector<std::string> wanted = {"rr", "onepsi1", "rrgen"};
            if (!check_name.empty()) {
                if (std::find(wanted.begin(), wanted.end(), check_name) == wanted.end())
                    throw qbethe::ConfigError("identity: unknown --check \"" + check_name + "\"");
                wanted = {check_name};
            }
            cfg.checks = intersect_checks(cfg.checks, wanted);
            if (cfg.checks.empty())
                throw qbethe::ConfigError("identity: requested check disabled by config");
            return do_run(cfg, out_path);
        }
        if (emit->parsed()) return do_emit(cfg, out_path);
        return 2;
    } catch (const qbethe::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const qbethe::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
