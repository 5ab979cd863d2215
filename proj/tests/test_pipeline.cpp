// Config parsing, end-to-end point runs, grid determinism across worker
// counts, fail-soft error recording, and the CSV emitters.
#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "support.hpp"

using namespace qbethe;
using testsupport::anchor;
using testsupport::data_file;

namespace {

json base_config() {
    return json{{"params", {{"q", 0.5}, {"xi", 0.3}, {"omega", 0.7}, {"N", 1}, {"S", 0}}}};
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string l;
    while (std::getline(in, l)) lines.push_back(l);
    return lines;
}

} // namespace

TEST_CASE("config rejection matrix") {
    using Catch::Matchers::ContainsSubstring;

    auto with = [](json j, const std::string& key, json v) {
        j[key] = std::move(v);
        return j;
    };

    REQUIRE_THROWS_WITH(parse_config(json::array()), ContainsSubstring("top level"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "bogus", 1)),
                        ContainsSubstring("unknown key"));
    REQUIRE_THROWS_WITH(parse_config(json::object()), ContainsSubstring("exactly one"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "grid", json::array({json::object()}))),
                        ContainsSubstring("exactly one"));

    {
        json j = base_config();
        j["params"]["q"] = 1.5;
        REQUIRE_THROWS_WITH(parse_config(j), ContainsSubstring("params.q"));
        j = base_config();
        j["params"]["N"] = 0;
        REQUIRE_THROWS_WITH(parse_config(j), ContainsSubstring("params.N"));
        j = base_config();
        j["params"]["spin"] = 2;
        REQUIRE_THROWS_WITH(parse_config(j), ContainsSubstring("unknown key"));
    }

    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "series_order", 4)),
                        ContainsSubstring("series_order"));
    REQUIRE_THROWS_WITH(
        parse_config(with(base_config(), "probes", json{{"r_lo", 1.5}, {"r_hi", 0.5}})),
        ContainsSubstring("r_lo < r_hi"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "probes", json{{"rad", 1.0}})),
                        ContainsSubstring("unknown key"));
    REQUIRE_THROWS_WITH(
        parse_config(with(base_config(), "bilateral", json{{"k_start", 80}, {"k_max", 40}})),
        ContainsSubstring("k_max >= k_start"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "solver", json{{"retries", 3}})),
                        ContainsSubstring("unknown key"));
    REQUIRE_THROWS_WITH(
        parse_config(with(base_config(), "solver", json{{"seeds", json{{"a"}}}})),
        ContainsSubstring("solver.seeds"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "checks", json::array({"qrecc"}))),
                        ContainsSubstring("unknown check"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "checks", json::array())),
                        ContainsSubstring("non-empty"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "tolerances", json{{"all", 1e-6}})),
                        ContainsSubstring("unknown key"));
    REQUIRE_THROWS_WITH(parse_config(with(base_config(), "workers", 0)),
                        ContainsSubstring("workers"));

    {
        json grid = json::array();
        for (int i = 0; i < 10001; ++i)
            grid.push_back(json{{"q", 0.5}, {"xi", 0.3}, {"omega", 0.7}, {"N", 1}, {"S", 0}});
        json j;
        j["grid"] = grid;
        REQUIRE_THROWS_WITH(parse_config(j), ContainsSubstring("at most 10000"));
        j["grid"] = json::array();
        REQUIRE_THROWS_WITH(parse_config(j), ContainsSubstring("non-empty"));
    }
}

TEST_CASE("config files load with the documented defaults") {
    const RunConfig cfg = read_config(data_file("n1s1.json"));
    REQUIRE(cfg.points.size() == 1);
    REQUIRE(cfg.points[0].N == 1);
    REQUIRE(cfg.points[0].S == 1);
    REQUIRE(cfg.series_order == 128);
    REQUIRE(cfg.probe_opts.count == 6);
    REQUIRE(cfg.probe_opts.seed == 42);
    REQUIRE(cfg.checks.size() == 6);   // defaults to every check
    REQUIRE(cfg.workers == 1);

    REQUIRE_THROWS_AS(read_config(data_file("no_such_file.json")), ConfigError);

    const auto tmp = std::filesystem::temp_directory_path() / "qbethe_bad_json.json";
    {
        std::ofstream out(tmp);
        out << "{ not json";
    }
    REQUIRE_THROWS_WITH(read_config(tmp.string()),
                        Catch::Matchers::ContainsSubstring("parse error"));
    std::filesystem::remove(tmp);
}

TEST_CASE("single point runs every check and passes") {
    const RunConfig cfg = read_config(data_file("n1s0.json"));
    const PointResult pt = run_point(cfg.points[0], cfg);
    REQUIRE(pt.errors.empty());
    REQUIRE(pt.passed);
    REQUIRE(pt.theta.zeros.size() == 1);
    REQUIRE(pt.probes.size() == 6);
    REQUIRE(pt.reports.size() == 6);
    const std::vector<std::string> names = {"hq_wronskian",        "q_reconstruction",
                                            "bae2",                "bilateral_product",
                                            "bilateral_summation", "weighted_bilateral"};
    for (size_t i = 0; i < names.size(); ++i) {
        REQUIRE(pt.reports[i].name == names[i]);
        REQUIRE(pt.reports[i].passed);
    }
}

TEST_CASE("grid runs are deterministic and worker-count independent") {
    RunConfig cfg = read_config(data_file("grid9.json"));
    const PipelineResult r1 = run_pipeline(cfg);
    const PipelineResult r2 = run_pipeline(cfg);
    cfg.workers = 3;
    const PipelineResult r3 = run_pipeline(cfg);

    REQUIRE(r1.points.size() == 9);
    REQUIRE(r1.passed);
    const std::string d1 = pipeline_json(r1).dump();
    REQUIRE(d1 == pipeline_json(r2).dump());
    REQUIRE(d1 == pipeline_json(r3).dump());
}

TEST_CASE("numerical failures are recorded per point, not thrown") {
    RunConfig cfg;
    cfg.points.push_back(anchor(1, 0, cd{5.0, 0}));   // convergence gate violated
    cfg.points.push_back(anchor(1, 0));
    cfg.series_order = 96;
    cfg.probe_opts.count = 4;
    cfg.checks = {"rr"};

    const PipelineResult res = run_pipeline(cfg);
    REQUIRE(res.points.size() == 2);
    REQUIRE_FALSE(res.passed);

    const PointResult& bad = res.points[0];
    REQUIRE_FALSE(bad.passed);
    REQUIRE(bad.errors.size() == 1);
    REQUIRE(bad.reports.size() == 1);
    REQUIRE(bad.reports[0].name == "rr");
    REQUIRE_FALSE(bad.reports[0].passed);
    REQUIRE(bad.reports[0].max_residual == kInf);
    REQUIRE_FALSE(bad.reports[0].notes.empty());

    const PointResult& good = res.points[1];
    REQUIRE(good.passed);
    REQUIRE(good.errors.empty());

    const reportjs::ojson j = pipeline_json(res);
    REQUIRE(j.at("passed") == false);
    REQUIRE(j.at("points").size() == 2);
    REQUIRE(j.at("points")[0].at("errors").size() == 1);
    REQUIRE(j.at("points")[1].at("errors").empty());
}

TEST_CASE("an unreachable tolerance fails the report without an exception") {
    const RunConfig cfg = read_config(data_file("fail_tol.json"));
    const PointResult pt = run_point(cfg.points[0], cfg);
    REQUIRE(pt.errors.empty());                  // nothing numerically wrong
    REQUIRE_FALSE(pt.passed);                    // the bar was impossible
    REQUIRE(pt.reports.size() == 1);
    REQUIRE_FALSE(pt.reports[0].passed);
    REQUIRE(pt.reports[0].max_residual > 1e-30);
}

TEST_CASE("series emitters write one CSV per artifact") {
    const RunConfig cfg = read_config(data_file("n1s0.json"));
    const PointResult pt = run_point(cfg.points[0], cfg);
    REQUIRE(pt.passed);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qbethe_emit_test";
    fs::create_directories(dir);
    emit_point_series(pt, dir.string(), 0);

    for (const char* stem : {"point0_h.csv", "point0_hprime.csv", "point0_theta.csv",
                             "point0_q.csv", "point0_t.csv"})
        REQUIRE(fs::exists(dir / stem));

    const auto q_lines = read_lines((dir / "point0_q.csv").string());
    REQUIRE(q_lines.size() == 2);
    REQUIRE(q_lines[0] == "power,re,im,trusted");
    REQUIRE(q_lines[1] == "0,1,0,1");   // no magnons: Q(x) = 1, trusted

    const auto t_lines = read_lines((dir / "point0_t.csv").string());
    REQUIRE(t_lines.size() == 3);
    {
        // t(x) = (1 - 0.3 x) + 0.7 (0.3 - x) = 1.21 - x
        std::istringstream row1(t_lines[1]), row2(t_lines[2]);
        int m, trusted;
        double re, im;
        char c;
        row1 >> m >> c >> re >> c >> im >> c >> trusted;
        REQUIRE(m == 0);
        REQUIRE(re == Catch::Approx(1.21).margin(1e-12));
        REQUIRE(im == Catch::Approx(0.0).margin(1e-15));
        REQUIRE(trusted == 1);
        row2 >> m >> c >> re >> c >> im >> c >> trusted;
        REQUIRE(m == 1);
        REQUIRE(re == Catch::Approx(-1.0).margin(1e-12));
    }

    const auto h_lines = read_lines((dir / "point0_h.csv").string());
    REQUIRE(h_lines.size() == static_cast<size_t>(cfg.series_order) + 2);

    fs::remove_all(dir);
}

TEST_CASE("summation-check draws are reproducible and seed-sensitive") {
    const auto d1 = detail::onepsi1_draws(cd{0.5, 0}, 5, 42);
    const auto d2 = detail::onepsi1_draws(cd{0.5, 0}, 5, 42);
    const auto d3 = detail::onepsi1_draws(cd{0.5, 0}, 5, 43);
    REQUIRE(d1.size() == 5);
    REQUIRE(std::memcmp(d1.data(), d2.data(), d1.size() * sizeof(d1[0])) == 0);
    bool differs = false;
    for (size_t i = 0; i < d1.size(); ++i)
        if (std::memcmp(&d1[i], &d3[i], sizeof(d1[0])) != 0) differs = true;
    REQUIRE(differs);
}
