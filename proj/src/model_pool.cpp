#include "inar/model_pool.hpp"

#include <algorithm>
#include <set>

#include "inar/document.hpp"
#include "inar/error.hpp"

namespace inar {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void validate_profile(const ModelProfile& m) {
    auto fail = [&](const std::string& what) { throw Error(ErrorCode::InvalidProfile, m.id + ": " + what); };
    if (m.id.empty()) throw Error(ErrorCode::InvalidProfile, "profile without id");
    if (!(m.params_b > 0.0)) fail("params_b must be positive");
    if (!(m.base_latency > 0.0)) fail("base_latency must be positive");
    if (!in_unit(m.strengths.blur) || !in_unit(m.strengths.detail) || !in_unit(m.strengths.reasoning)) {
        fail("strengths must lie in [0,1]");
    }
    if (!in_unit(m.accuracy)) fail("accuracy must lie in [0,1]");
    if (m.supported_resolutions.empty()) fail("no supported resolutions");
    if (!std::is_sorted(m.supported_resolutions.begin(), m.supported_resolutions.end()) ||
        std::adjacent_find(m.supported_resolutions.begin(), m.supported_resolutions.end()) !=
            m.supported_resolutions.end()) {
        fail("supported resolutions must be strictly ascending");
    }
    if (m.supported_resolutions.front() <= 0) fail("resolutions must be positive");
    if (std::find(m.supported_resolutions.begin(), m.supported_resolutions.end(), m.calibration_resolution) ==
        m.supported_resolutions.end()) {
        fail("calibration resolution is not a supported resolution");
    }
    if (!(m.gpu_latency_mean_ms > 0.0) || m.gpu_latency_p95_ms < m.gpu_latency_mean_ms) {
        fail("latency priors need mean > 0 and p95 >= mean");
    }
    const Precision pinned = m.tier == Tier::Edge ? Precision::Int8 : Precision::Fp16;
    if (m.precision != pinned) fail("edge models run INT8 and cloud models FP16");
}

ModelProfile profile_from_json(const nlohmann::json& j) {
    ModelProfile m;
    m.id = j.at("id").get<std::string>();
    m.params_b = j.at("params_b").get<double>();
    m.tier = parse_tier(j.at("tier").get<std::string>());
    m.precision = j.contains("precision") ? parse_precision(j.at("precision").get<std::string>())
                                          : (m.tier == Tier::Edge ? Precision::Int8 : Precision::Fp16);
    const auto& s = j.at("strengths");
    m.strengths = {s.at("blur").get<double>(), s.at("detail").get<double>(), s.at("reasoning").get<double>()};
    m.accuracy = j.at("accuracy").get<double>();
    m.supported_resolutions = j.at("resolutions").get<std::vector<int>>();
    m.calibration_resolution = j.contains("r_cal") ? j.at("r_cal").get<int>()
                                                   : (m.supported_resolutions.empty() ? 0 : m.supported_resolutions.back());
    m.base_latency = j.value("base_latency", m.params_b);
    m.gpu_latency_mean_ms = j.at("gpu_latency_ms").at("mean").get<double>();
    m.gpu_latency_p95_ms = j.at("gpu_latency_ms").at("p95").get<double>();
    return m;
}

ModelProfile make_profile(std::string id, Tier tier, Strengths strengths, double accuracy, double mean_ms,
                          double p95_ms, std::vector<int> resolutions) {
    ModelProfile m;
    m.id = std::move(id);
    m.tier = tier;
    m.params_b = tier == Tier::Edge ? 2.0 : 8.0;
    m.precision = tier == Tier::Edge ? Precision::Int8 : Precision::Fp16;
    m.strengths = strengths;
    m.accuracy = accuracy;
    m.supported_resolutions = std::move(resolutions);
    m.calibration_resolution = m.supported_resolutions.back();
    m.base_latency = m.params_b;
    m.gpu_latency_mean_ms = mean_ms;
    m.gpu_latency_p95_ms = p95_ms;
    return m;
}

}  // namespace

const char* to_string(Tier t) noexcept { return t == Tier::Edge ? "edge" : "cloud"; }
const char* to_string(Precision p) noexcept { return p == Precision::Int8 ? "INT8" : "FP16"; }

Tier parse_tier(std::string_view s) {
    if (s == "edge") return Tier::Edge;
    if (s == "cloud") return Tier::Cloud;
    throw Error(ErrorCode::InvalidProfile, "unknown tier '" + std::string(s) + "'");
}

Precision parse_precision(std::string_view s) {
    if (s == "INT8" || s == "int8") return Precision::Int8;
    if (s == "FP16" || s == "fp16") return Precision::Fp16;
    throw Error(ErrorCode::InvalidProfile, "unknown precision '" + std::string(s) + "'");
}

double bytes_per_param(Precision p) noexcept { return p == Precision::Int8 ? 1.0 : 2.0; }

const ModelProfile* PoolConfig::find(std::string_view id) const noexcept {
    for (const auto& m : profiles) {
        if (m.id == id) return &m;
    }
    return nullptr;
}

const ModelProfile& PoolConfig::at(std::string_view id) const {
    if (const auto* m = find(id)) return *m;
    throw Error(ErrorCode::UnknownModel, "no model '" + std::string(id) + "' in pool");
}

PoolConfig PoolConfig::restricted_to(std::span<const std::string> ids) const {
    for (const auto& id : ids) (void)at(id);
    PoolConfig out;
    out.edge_vram_budget_bytes = edge_vram_budget_bytes;
    for (const auto& m : profiles) {
        if (std::find(ids.begin(), ids.end(), m.id) != ids.end()) out.profiles.push_back(m);
    }
    validate(out);
    return out;
}

void validate(const PoolConfig& pool) {
    std::set<std::string> seen;
    bool has_edge = false;
    bool has_cloud = false;
    double edge_bytes = 0.0;
    for (const auto& m : pool.profiles) {
        if (!seen.insert(m.id).second) throw Error(ErrorCode::DuplicateId, "duplicate model id '" + m.id + "'");
        validate_profile(m);
        if (m.tier == Tier::Edge) {
            has_edge = true;
            edge_bytes += m.footprint_bytes();
        } else {
            has_cloud = true;
        }
    }
    if (!has_edge) throw Error(ErrorCode::EmptyTier, "pool has no edge model");
    if (!has_cloud) throw Error(ErrorCode::EmptyTier, "pool has no cloud model");
    if (edge_bytes > pool.edge_vram_budget_bytes) {
        throw Error(ErrorCode::BudgetExceeded, "edge models need " + std::to_string(edge_bytes / 1e9) +
                                                   " GB, budget is " +
                                                   std::to_string(pool.edge_vram_budget_bytes / 1e9) + " GB");
    }
}

PoolConfig load_pool(const nlohmann::json& doc) {
    require_schema(doc, "pool/1", "pool");
    PoolConfig pool;
    try {
        if (doc.contains("edge_vram_budget_gb")) pool.edge_vram_budget_bytes = doc["edge_vram_budget_gb"].get<double>() * 1e9;
        for (const auto& entry : doc.at("models")) pool.profiles.push_back(profile_from_json(entry));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("pool: ") + e.what());
    }
    validate(pool);
    return pool;
}

PoolConfig load_pool_file(const std::filesystem::path& path) { return load_pool(load_document(path)); }

nlohmann::json to_json(const PoolConfig& pool) {
    nlohmann::json models = nlohmann::json::array();
    for (const auto& m : pool.profiles) {
        models.push_back({
            {"id", m.id},
            {"params_b", m.params_b},
            {"tier", to_string(m.tier)},
            {"precision", to_string(m.precision)},
            {"strengths", {{"blur", m.strengths.blur}, {"detail", m.strengths.detail}, {"reasoning", m.strengths.reasoning}}},
            {"accuracy", m.accuracy},
            {"resolutions", m.supported_resolutions},
            {"r_cal", m.calibration_resolution},
            {"base_latency", m.base_latency},
            {"gpu_latency_ms", {{"mean", m.gpu_latency_mean_ms}, {"p95", m.gpu_latency_p95_ms}}},
        });
    }
    return {{"schema", "pool/1"}, {"edge_vram_budget_gb", pool.edge_vram_budget_bytes / 1e9}, {"models", models}};
}

PoolConfig reference_pool() {
    PoolConfig pool;
    const std::vector<int> edge_ladder{224, 336, 448};
    pool.profiles.push_back(make_profile("qwen3-vl-2b", Tier::Edge, {0.55, 0.75, 0.50}, 0.680, 682, 990, edge_ladder));
    pool.profiles.push_back(make_profile("smolvlm-2b", Tier::Edge, {0.50, 0.55, 0.45}, 0.650, 1468, 1846, edge_ladder));
    pool.profiles.push_back(make_profile("llava-ov-8b", Tier::Cloud, {0.70, 0.65, 0.85}, 0.740, 281, 371, {448}));
    pool.profiles.push_back(make_profile("qwen3-vl-8b", Tier::Cloud, {0.75, 0.85, 0.70}, 0.748, 222, 282, {448}));
    validate(pool);
    return pool;
}

std::vector<Configuration> candidates(const PoolConfig& pool, const NetworkState& network) {
    std::vector<Configuration> out;
    for (const auto& m : pool.profiles) {
        if (m.tier == Tier::Edge) {
            for (int r : m.supported_resolutions) out.push_back({m.id, m.precision, r, Tier::Edge});
        } else if (!network.guard_active()) {
            out.push_back({m.id, m.precision, m.calibration_resolution, Tier::Cloud});
        }
    }
    return out;
}

void to_json(nlohmann::json& j, const Configuration& c) {
    j = nlohmann::json{{"model", c.model_id},
                       {"precision", to_string(c.precision)},
                       {"resolution", c.resolution},
                       {"placement", to_string(c.placement)}};
}

void from_json(const nlohmann::json& j, Configuration& c) {
    c.model_id = j.at("model").get<std::string>();
    c.precision = parse_precision(j.at("precision").get<std::string>());
    c.resolution = j.at("resolution").get<int>();
    c.placement = parse_tier(j.at("placement").get<std::string>());
}

}  // namespace inar
