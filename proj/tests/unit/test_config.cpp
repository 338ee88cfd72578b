#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "inar/config.hpp"
#include "inar/error.hpp"

using namespace inar;

namespace {

const char* no_env(const char*) { return nullptr; }

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("defaults") {
    const RunConfig cfg = load_config({}, {}, no_env);
    CHECK(cfg.kappa == 1.0);
    CHECK(cfg.res_coeff == 0.07);
    CHECK(cfg.delta_min == 0.03);
    CHECK(cfg.guard_mbps == 15.0);
    CHECK(cfg.bandwidth_mbps == 100.0);
    CHECK(cfg.replicates == 5);
    CHECK_FALSE(cfg.tau_edge.has_value());
    CHECK_FALSE(cfg.overridden("kappa"));
    CHECK(cfg.sources.at("bandwidth") == "default");
    CHECK(std::filesystem::exists(cfg.pool));
    CHECK(std::filesystem::exists(cfg.bundle));
}

TEST_CASE("precedence: flag over env over file over default") {
    const auto file = write_temp("inar_cfg_prec.yaml", "schema: config/1\nbandwidth: 20\nkappa: 0.5\nreplicates: 3\n");
    const std::filesystem::path files[] = {file};

    const RunConfig from_file = load_config(files, {}, no_env);
    CHECK(from_file.bandwidth_mbps == 20.0);
    CHECK(from_file.kappa == 0.5);
    CHECK(from_file.replicates == 3);
    CHECK(from_file.sources.at("kappa").rfind("file:", 0) == 0);

    auto env = [](const char* name) -> const char* { return std::strcmp(name, "INAR_BANDWIDTH") == 0 ? "50" : nullptr; };
    const RunConfig from_env = load_config(files, {}, env);
    CHECK(from_env.bandwidth_mbps == 50.0);
    CHECK(from_env.sources.at("bandwidth") == "env");
    CHECK(from_env.kappa == 0.5);

    const RunConfig from_flag = load_config(files, {{"bandwidth", "80"}}, env);
    CHECK(from_flag.bandwidth_mbps == 80.0);
    CHECK(from_flag.sources.at("bandwidth") == "flag");
    CHECK(from_flag.overridden("bandwidth"));

    // Later files win.
    const auto second = write_temp("inar_cfg_prec2.json", R"({"schema":"config/1","kappa":2.0})");
    const std::filesystem::path both[] = {file, second};
    CHECK(load_config(both, {}, no_env).kappa == 2.0);
    std::filesystem::remove(file);
    std::filesystem::remove(second);
}

TEST_CASE("relative paths resolve against the config file") {
    const auto dir = std::filesystem::temp_directory_path() / "inar_cfg_rel";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "c.yaml") << "pool: sub/pool.yaml\n";
    const std::filesystem::path files[] = {dir / "c.yaml"};
    CHECK(load_config(files, {}, no_env).pool == (dir / "sub/pool.yaml").lexically_normal());
    std::filesystem::remove_all(dir);
}

TEST_CASE("bad config documents name file and line") {
    auto expect = [](const std::string& text, const std::string& fragment) {
        const auto file = write_temp("inar_cfg_bad.yaml", text);
        const std::filesystem::path files[] = {file};
        try {
            load_config(files, {}, no_env);
            FAIL("expected ParseError");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
        std::filesystem::remove(file);
    };
    expect("bandwidth: 20\nkapa: 1\n", "inar_cfg_bad.yaml:2");
    expect("bandwidth: 20\nreplicates: lots\n", "inar_cfg_bad.yaml:2");
    expect("schema: config/9\n", "inar_cfg_bad.yaml:1");

    CHECK_THROWS_AS(load_config({}, {{"colour", "red"}}, no_env), Error);
    CHECK_THROWS_AS(load_config({}, {{"bandwidth", "fast"}}, no_env), Error);
    CHECK_THROWS_AS(load_config({}, {{"bandwidth", "-1"}}, no_env), Error);
    CHECK_THROWS_AS(load_config({}, {{"replicates", "0"}}, no_env), Error);
    auto bad_env = [](const char* name) -> const char* { return std::strcmp(name, "INAR_KAPPA") == 0 ? "x" : nullptr; };
    CHECK_THROWS_AS(load_config({}, {}, bad_env), Error);
}

TEST_CASE("effective config echoes every key") {
    const RunConfig cfg = load_config({}, {{"tau_edge", "0.6"}}, no_env);
    REQUIRE(cfg.tau_edge.has_value());
    CHECK(*cfg.tau_edge == 0.6);
    for (const char* key : config_keys()) CHECK(cfg.effective.at("values").contains(key));
}
