// End-to-end command-line checks: exit codes, report output, CSV emission.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "support.hpp"

#ifdef _WIN32
#error "these tests drive the binary through POSIX exit statuses"
#endif
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(QBETHE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    REQUIRE(rc != -1);
    REQUIRE(WIFEXITED(rc));
    return WEXITSTATUS(rc);
}

std::string cfg(const std::string& name) { return "--config " + testsupport::data_file(name); }

} // namespace

TEST_CASE("healthy configs exit 0 on every subcommand") {
    REQUIRE(run_cli("solve " + cfg("n1s1.json")) == 0);
    REQUIRE(run_cli("verify " + cfg("n1s1.json")) == 0);
    REQUIRE(run_cli("identity " + cfg("n1s1.json") + " --check onepsi1") == 0);
}

TEST_CASE("a failed check exits 1") {
    REQUIRE(run_cli("verify " + cfg("fail_tol.json")) == 1);
}

TEST_CASE("usage and config problems exit 2") {
    REQUIRE(run_cli("verify " + cfg("bad_q.json")) == 2);
    REQUIRE(run_cli("verify --config /nonexistent/qbethe.json") == 2);
    REQUIRE(run_cli("identity " + cfg("n1s1.json") + " --check bogus") == 2);
    // every identity-family check disabled by the config
    REQUIRE(run_cli("verify " + cfg("verify_empty.json")) == 2);
    REQUIRE(run_cli("") == 2);                       // a subcommand is required
    REQUIRE(run_cli("verify " + cfg("n1s1.json") + " --frobnicate") == 2);
    REQUIRE(run_cli("emit " + cfg("n1s0.json")) == 2);   // --out is required
}

TEST_CASE("numerical failures exit 3") {
    REQUIRE(run_cli("identity " + cfg("gate_violation.json") + " --check rr") == 3);
}

TEST_CASE("reports are written where requested") {
    const fs::path out = fs::temp_directory_path() / "qbethe_cli_report.json";
    fs::remove(out);
    REQUIRE(run_cli("verify " + cfg("n1s1.json") + " --workers 2 --out " + out.string()) == 0);
    std::ifstream in(out);
    REQUIRE(in.good());
    const auto j = nlohmann::json::parse(in);
    REQUIRE(j.at("tool") == "qbethe");
    REQUIRE(j.at("passed") == true);
    REQUIRE(j.at("points").size() == 1);
    REQUIRE(j.at("points")[0].at("checks").size() == 3);
    fs::remove(out);
}

TEST_CASE("emit writes the five series files for a single point") {
    const fs::path dir = fs::temp_directory_path() / "qbethe_cli_emit";
    fs::remove_all(dir);
    fs::create_directories(dir);
    REQUIRE(run_cli("emit " + cfg("n1s0.json") + " --out " + dir.string()) == 0);
    for (const char* stem : {"point0_h.csv", "point0_hprime.csv", "point0_theta.csv",
                             "point0_q.csv", "point0_t.csv"})
        REQUIRE(fs::exists(dir / stem));
    // emit is defined for exactly one parameter point
    REQUIRE(run_cli("emit " + cfg("grid9.json") + " --out " + dir.string()) == 2);
    fs::remove_all(dir);
}
