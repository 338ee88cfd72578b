#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "oracles.hpp"

namespace {

struct Run {
    int status = -1;
    std::string out;
};

// Runs the CLI with stderr folded into stdout.
Run run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + INAR_BIN + "\" " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

// stdout only.
Run run_cli_stdout(const std::string& args) { return run_cli(args + " 2>/dev/null"); }

std::string quoted(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("help exits 0 everywhere") {
    CHECK(run_cli("--help").status == 0);
    for (const char* sub : {"extract", "route", "calibrate", "simulate", "replay", "sweep", "energy"}) {
        const Run r = run_cli(std::string(sub) + " --help");
        CHECK_MESSAGE(r.status == 0, sub);
        CHECK(r.out.find("Usage") != std::string::npos);
    }
}

TEST_CASE("usage errors exit 1 with usage") {
    const Run unknown = run_cli("simulate --no-such-flag");
    CHECK(unknown.status == 1);
    CHECK(unknown.out.find("Usage") != std::string::npos);
    CHECK(run_cli("frobnicate").status == 1);
    CHECK(run_cli("extract").status == 1);
    CHECK(run_cli("route --bandwidth fast " + quoted(oracle::fixture("sharp.png")) + " \"What is it?\"").status == 1);
}

TEST_CASE("missing files exit 2") {
    CHECK(run_cli("extract /nonexistent/x.png \"What?\"").status == 2);
    CHECK(run_cli("replay /nonexistent/trace.jsonl").status == 2);
    CHECK(run_cli("route --pool /nonexistent/pool.yaml " + quoted(oracle::fixture("sharp.png")) + " \"Q?\"").status == 2);
}

TEST_CASE("route below the guard stays on the edge") {
    const Run r = run_cli_stdout("route --bandwidth 10 " + quoted(oracle::fixture("blurred.png")) +
                                 " \"Why is the man on the left holding the sign?\"");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.at("reason") == "BandwidthGuard");
    CHECK(r.out.find("BandwidthGuard") != std::string::npos);
}

TEST_CASE("route honors the bandwidth environment variable") {
    const Run r = run_cli_stdout("route --strategy cloud " + quoted(oracle::fixture("sharp.png")) + " \"What is it?\"");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out).at("reason") != "BandwidthGuard");
    const std::string cmd_env = std::string("INAR_BANDWIDTH=10 \"") + INAR_BIN + "\" route --strategy cloud " +
                                quoted(oracle::fixture("sharp.png")) + " \"What is it?\" 2>/dev/null";
    FILE* pipe = popen(cmd_env.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
    pclose(pipe);
    CHECK(nlohmann::json::parse(out).at("reason") == "BandwidthGuard");
}

TEST_CASE("extract matches the golden descriptor") {
    const Run r = run_cli_stdout("extract " + quoted(oracle::fixture("sharp.png")) + " \"What is the total?\"");
    REQUIRE(r.status == 0);
    CHECK(r.out == read_file(oracle::fixture("sharp_total.descriptor.json")));
}

TEST_CASE("energy subcommand integrates a CSV trace") {
    const auto path = std::filesystem::temp_directory_path() / "inar_cli_power.csv";
    std::ofstream(path) << "t_ms,watts\n0,22\n1000,22\n2000,22\n3000,22\n";
    const Run r = run_cli_stdout("energy " + quoted(path) + " --idle 12");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out).at("energy_j").get<double>() == doctest::Approx(30.0).epsilon(1e-12));
    std::filesystem::remove(path);
}
