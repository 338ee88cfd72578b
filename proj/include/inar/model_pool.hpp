#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace inar {

enum class Tier { Edge, Cloud };
enum class Precision { Int8, Fp16 };

const char* to_string(Tier t) noexcept;
const char* to_string(Precision p) noexcept;
Tier parse_tier(std::string_view s);
Precision parse_precision(std::string_view s);

/// Bytes per parameter for weight storage at this precision.
double bytes_per_param(Precision p) noexcept;

/// Capability thresholds on the three mismatch axes.
struct Strengths {
    double blur = 0.0;
    double detail = 0.0;
    double reasoning = 0.0;
};

struct ModelProfile {
    std::string id;
    double params_b = 0.0;
    Tier tier = Tier::Edge;
    Precision precision = Precision::Int8;
    Strengths strengths;
    /// Calibrated accuracy a_m at the calibration resolution.
    double accuracy = 0.0;
    int calibration_resolution = 0;
    /// B_m in the cost estimator.
    double base_latency = 0.0;
    double gpu_latency_mean_ms = 0.0;
    double gpu_latency_p95_ms = 0.0;
    /// Ascending.
    std::vector<int> supported_resolutions;

    double footprint_bytes() const noexcept { return params_b * bytes_per_param(precision) * 1e9; }
};

struct PoolConfig {
    std::vector<ModelProfile> profiles;
    double edge_vram_budget_bytes = 8e9;

    const ModelProfile* find(std::string_view id) const noexcept;
    /// Throws UnknownModel.
    const ModelProfile& at(std::string_view id) const;
    /// Keeps the listed ids in pool order. Throws UnknownModel for any id not
    /// present; the result is validated.
    PoolConfig restricted_to(std::span<const std::string> ids) const;
};

/// Checks every profile and pool-level invariant. Throws DuplicateId,
/// EmptyTier, BudgetExceeded or InvalidProfile.
void validate(const PoolConfig& pool);

/// pool/1 document -> validated pool.
PoolConfig load_pool(const nlohmann::json& doc);
PoolConfig load_pool_file(const std::filesystem::path& path);
nlohmann::json to_json(const PoolConfig& pool);

/// Two INT8 edge models and two FP16 cloud models with shipped priors.
PoolConfig reference_pool();

struct NetworkState {
    double bandwidth_mbps = 100.0;
    /// Below this bandwidth everything stays on the edge.
    double guard_mbps = 15.0;

    bool guard_active() const noexcept { return bandwidth_mbps < guard_mbps; }
};

/// A routable (model, precision, resolution, placement) tuple.
struct Configuration {
    std::string model_id;
    Precision precision = Precision::Int8;
    int resolution = 0;
    Tier placement = Tier::Edge;

    bool operator==(const Configuration&) const = default;
};

/// Edge models at each supported resolution, cloud models at their
/// calibration resolution only. Cloud entries are dropped while the
/// bandwidth guard is active.
std::vector<Configuration> candidates(const PoolConfig& pool, const NetworkState& network);

void to_json(nlohmann::json& j, const Configuration& c);
void from_json(const nlohmann::json& j, Configuration& c);

}  // namespace inar
