#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

namespace inar {

/// Directory holding the shipped reference configs.
std::filesystem::path default_config_dir();

/// Effective run settings after merging defaults, config files, INAR_*
/// environment variables and command-line flags (later wins).
struct RunConfig {
    std::filesystem::path pool;
    std::filesystem::path bundle;
    std::filesystem::path truth;
    std::filesystem::path cost;
    std::filesystem::path workload;
    std::filesystem::path out_dir;

    double bandwidth_mbps = 100.0;
    double guard_mbps = 15.0;
    double kappa = 1.0;
    double res_coeff = 0.07;
    double delta_min = 0.03;
    std::optional<double> tau_edge;

    int replicates = 5;
    std::uint64_t outcome_seed = 1;
    std::uint64_t latency_seed = 2;
    std::optional<std::uint64_t> workload_seed;
    std::optional<std::size_t> n_requests;
    bool allow_unfrozen = false;

    /// key -> "default" | "file:<path>" | "env" | "flag".
    std::map<std::string, std::string> sources;
    /// Merged values, echoed into run manifests.
    nlohmann::json effective;

    /// True when `key` was set by anything other than the defaults.
    bool overridden(const std::string& key) const;
};

using Overrides = std::map<std::string, std::string>;
using EnvLookup = std::function<const char*(const char*)>;

/// Recognized keys (also the config file keys and, upper-cased with an
/// INAR_ prefix, the environment variable names).
std::span<const char* const> config_keys();

/// Merges `files` in order, then the environment, then `flags`. Config files
/// are config/1 documents in YAML or JSON. Throws ParseError naming the file
/// and line for unknown keys or ill-typed values.
RunConfig load_config(std::span<const std::filesystem::path> files, const Overrides& flags,
                      const EnvLookup& env = [](const char* name) -> const char* { return std::getenv(name); });

}  // namespace inar
