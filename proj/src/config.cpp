#include "inar/config.hpp"

#include <algorithm>
#include <cctype>

#include "inar/document.hpp"
#include "inar/error.hpp"

#ifndef INAR_CONFIG_DIR
#define INAR_CONFIG_DIR "configs"
#endif

namespace inar {

namespace {

enum class Kind { Path, Number, Integer, Bool };

struct KeySpec {
    const char* name;
    Kind kind;
};

constexpr KeySpec kKeys[] = {
    {"pool", Kind::Path},          {"bundle", Kind::Path},          {"truth", Kind::Path},
    {"cost", Kind::Path},          {"workload", Kind::Path},        {"out_dir", Kind::Path},
    {"bandwidth", Kind::Number},   {"guard_mbps", Kind::Number},    {"kappa", Kind::Number},
    {"res_coeff", Kind::Number},   {"delta_min", Kind::Number},     {"tau_edge", Kind::Number},
    {"replicates", Kind::Integer}, {"outcome_seed", Kind::Integer}, {"latency_seed", Kind::Integer},
    {"workload_seed", Kind::Integer}, {"n_requests", Kind::Integer}, {"allow_unfrozen", Kind::Bool},
};

constexpr const char* kKeyNames[] = {
    "pool",       "bundle",       "truth",        "cost",          "workload",   "out_dir",
    "bandwidth",  "guard_mbps",   "kappa",        "res_coeff",     "delta_min",  "tau_edge",
    "replicates", "outcome_seed", "latency_seed", "workload_seed", "n_requests", "allow_unfrozen",
};

const KeySpec* find_key(std::string_view name) {
    for (const auto& k : kKeys) {
        if (name == k.name) return &k;
    }
    return nullptr;
}

// Best-effort line of a key inside a YAML or JSON source.
std::size_t line_of_key(std::string_view text, std::string_view key) {
    std::size_t line = 1;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view l = text.substr(pos, end - pos);
        const auto first = l.find_first_not_of(" \t{,");
        if (first != std::string_view::npos) {
            l.remove_prefix(first);
            if (!l.empty() && l.front() == '"') l.remove_prefix(1);
            if (l.substr(0, key.size()) == key) {
                const auto rest = l.substr(key.size());
                if (!rest.empty() && (rest.front() == ':' || rest.front() == '"')) return line;
            }
        }
        pos = end + 1;
        ++line;
    }
    return 1;
}

[[noreturn]] void bad_value(const std::string& where, const char* key, const char* what, const std::string& got) {
    throw Error(ErrorCode::ParseError, where + ": " + key + " expects " + what + ", got " + got);
}

nlohmann::json parse_scalar(const KeySpec& spec, const std::string& raw, const std::string& where) {
    auto fail = [&](const char* what) { bad_value(where, spec.name, what, "'" + raw + "'"); };
    switch (spec.kind) {
        case Kind::Path:
            return raw;
        case Kind::Number: {
            try {
                std::size_t used = 0;
                const double v = std::stod(raw, &used);
                if (used == raw.size()) return v;
            } catch (const std::exception&) {
            }
            bad_value(where, spec.name, "a number", "'" + raw + "'");
        }
        case Kind::Integer: {
            try {
                std::size_t used = 0;
                if (!raw.empty() && raw.front() != '-') {
                    const unsigned long long v = std::stoull(raw, &used);
                    if (used == raw.size()) return v;
                }
            } catch (const std::exception&) {
            }
            bad_value(where, spec.name, "a non-negative integer", "'" + raw + "'");
        }
        case Kind::Bool: {
            std::string lower = raw;
            std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
            if (lower == "1" || lower == "true" || lower == "yes" || lower == "on") return true;
            if (lower == "0" || lower == "false" || lower == "no" || lower == "off") return false;
            fail("a boolean");
            return nullptr;
        }
    }
    return nullptr;
}

nlohmann::json check_value(const KeySpec& spec, const nlohmann::json& v, const std::string& where) {
    auto fail = [&](const char* what) {
        throw Error(ErrorCode::ParseError, where + ": " + spec.name + " expects " + what + ", got " + v.dump());
    };
    switch (spec.kind) {
        case Kind::Path:
            if (!v.is_string()) fail("a path string");
            return v;
        case Kind::Number:
            if (!v.is_number()) fail("a number");
            return v.get<double>();
        case Kind::Integer:
            if (!v.is_number_integer() || v.get<long long>() < 0) fail("a non-negative integer");
            return v.get<std::uint64_t>();
        case Kind::Bool:
            if (!v.is_boolean()) fail("a boolean");
            return v;
    }
    return v;
}

}  // namespace

std::filesystem::path default_config_dir() {
    if (const char* dir = std::getenv("INAR_CONFIG_DIR")) return dir;
    return INAR_CONFIG_DIR;
}

bool RunConfig::overridden(const std::string& key) const {
    const auto it = sources.find(key);
    return it != sources.end() && it->second != "default";
}

std::span<const char* const> config_keys() { return kKeyNames; }

RunConfig load_config(std::span<const std::filesystem::path> files, const Overrides& flags, const EnvLookup& env) {
    const auto dir = default_config_dir();
    nlohmann::json values = {
        {"pool", (dir / "pool.yaml").string()},
        {"bundle", (dir / "bundle.json").string()},
        {"truth", (dir / "truth.json").string()},
        {"cost", (dir / "cost.json").string()},
        {"workload", (dir / "workload.yaml").string()},
        {"out_dir", "."},
        {"bandwidth", 100.0},
        {"guard_mbps", 15.0},
        {"kappa", 1.0},
        {"res_coeff", 0.07},
        {"delta_min", 0.03},
        {"tau_edge", nullptr},
        {"replicates", 5},
        {"outcome_seed", 1},
        {"latency_seed", 2},
        {"workload_seed", nullptr},
        {"n_requests", nullptr},
        {"allow_unfrozen", false},
    };
    RunConfig cfg;
    for (const auto& k : kKeys) cfg.sources[k.name] = "default";

    for (const auto& path : files) {
        const std::string text = read_text_file(path);
        const auto ext = path.extension().string();
        const nlohmann::json doc = parse_document(text, path.string(), ext == ".yaml" || ext == ".yml");
        if (!doc.is_object()) throw Error(ErrorCode::ParseError, path.string() + ":1: expected a mapping");
        if (doc.contains("schema") && doc["schema"] != "config/1") {
            throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_of_key(text, "schema")) +
                                                   ": expected schema \"config/1\"");
        }
        for (const auto& [key, value] : doc.items()) {
            if (key == "schema") continue;
            const std::string where = path.string() + ":" + std::to_string(line_of_key(text, key));
            const KeySpec* spec = find_key(key);
            if (spec == nullptr) throw Error(ErrorCode::ParseError, where + ": unknown key '" + key + "'");
            nlohmann::json v = check_value(*spec, value, where);
            if (spec->kind == Kind::Path) {
                // Relative paths resolve against the config file's directory.
                std::filesystem::path p = v.get<std::string>();
                if (p.is_relative()) p = path.parent_path() / p;
                v = p.lexically_normal().string();
            }
            values[key] = v;
            cfg.sources[key] = "file:" + path.string();
        }
    }

    for (const auto& k : kKeys) {
        std::string name = std::string("INAR_") + k.name;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
        if (const char* raw = env(name.c_str())) {
            values[k.name] = parse_scalar(k, raw, "environment " + name);
            cfg.sources[k.name] = "env";
        }
    }

    for (const auto& [key, raw] : flags) {
        const KeySpec* spec = find_key(key);
        if (spec == nullptr) throw Error(ErrorCode::ParseError, "unknown option '" + key + "'");
        values[key] = parse_scalar(*spec, raw, "--" + key);
        cfg.sources[key] = "flag";
    }

    cfg.pool = values["pool"].get<std::string>();
    cfg.bundle = values["bundle"].get<std::string>();
    cfg.truth = values["truth"].get<std::string>();
    cfg.cost = values["cost"].get<std::string>();
    cfg.workload = values["workload"].get<std::string>();
    cfg.out_dir = values["out_dir"].get<std::string>();
    cfg.bandwidth_mbps = values["bandwidth"].get<double>();
    cfg.guard_mbps = values["guard_mbps"].get<double>();
    cfg.kappa = values["kappa"].get<double>();
    cfg.res_coeff = values["res_coeff"].get<double>();
    cfg.delta_min = values["delta_min"].get<double>();
    if (!values["tau_edge"].is_null()) cfg.tau_edge = values["tau_edge"].get<double>();
    cfg.replicates = static_cast<int>(values["replicates"].get<std::uint64_t>());
    cfg.outcome_seed = values["outcome_seed"].get<std::uint64_t>();
    cfg.latency_seed = values["latency_seed"].get<std::uint64_t>();
    if (!values["workload_seed"].is_null()) cfg.workload_seed = values["workload_seed"].get<std::uint64_t>();
    if (!values["n_requests"].is_null()) cfg.n_requests = values["n_requests"].get<std::uint64_t>();
    cfg.allow_unfrozen = values["allow_unfrozen"].get<bool>();

    if (cfg.bandwidth_mbps < 0.0) throw Error(ErrorCode::ParseError, "bandwidth must be non-negative");
    if (cfg.replicates < 1) throw Error(ErrorCode::ParseError, "replicates must be at least 1");
    if (cfg.delta_min < 0.0) throw Error(ErrorCode::ParseError, "delta_min must be non-negative");

    values["schema"] = "config/1";
    cfg.effective = {{"values", values}, {"sources", cfg.sources}};
    return cfg;
}

}  // namespace inar
