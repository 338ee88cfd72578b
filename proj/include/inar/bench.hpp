#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inar/calibration.hpp"
#include "inar/model_pool.hpp"
#include "inar/simulator.hpp"
#include "inar/strategies.hpp"

namespace inar {

// ---------------------------------------------------------------------------
// Replay traces (replay/1 JSON Lines)

struct Measurement {
    double latency_ms = 0.0;
    double energy_j = 0.0;
};

struct ReplayRecord {
    std::uint64_t id = 0;
    ImageQuality image;
    TextAxes text_axes{};
    /// Per-model score in [0,1], read at the model's calibration resolution.
    std::map<std::string, double> scores;
    /// Optional measured cost of running each model on its own tier.
    std::map<std::string, Measurement> measured;
};

struct ReplayTrace {
    std::vector<ReplayRecord> records;

    std::vector<Request> requests() const;
};

nlohmann::json to_json(const ReplayRecord& record);
ReplayRecord replay_record_from_json(const nlohmann::json& j);

/// Parses and validates replay/1 lines. Throws SchemaMismatch (bad schema
/// tag, malformed line, score outside [0,1]) or PartialCoverage naming the
/// first record that lacks a pool model.
ReplayTrace parse_trace(std::string_view text, std::string_view origin, const PoolConfig& pool);
ReplayTrace ingest_trace(const std::filesystem::path& path, const PoolConfig& pool);
void write_trace(const std::filesystem::path& path, const ReplayTrace& trace);
std::string dump_trace(const ReplayTrace& trace);

/// Records every pool model's outcome and cost on `source` for each request.
ReplayTrace export_trace(std::span<const Request> requests, const PoolConfig& pool, const OutcomeSource& source);

/// Reads scores and measurements from a trace. Requests without a measurement
/// fall back to the simulated cost model.
class ReplaySource final : public OutcomeSource {
public:
    ReplaySource(const ReplayTrace& trace, TierCostModel fallback, NetworkState network, std::uint64_t latency_seed);

    double score(const Request& request, const ModelProfile& model, int resolution) const override;
    double latency_ms(const Request& request, const ModelProfile& model, Tier placement) const override;
    double energy_j(const Request& request, const ModelProfile& model, Tier placement) const override;

private:
    const ReplayRecord& record(const Request& request) const;

    std::map<std::uint64_t, const ReplayRecord*> index_;
    TierCostModel fallback_;
    NetworkState network_;
    std::uint64_t latency_seed_;
};

// ---------------------------------------------------------------------------
// Reports

struct StrategySummary {
    StrategyKind kind = StrategyKind::InarVl;
    std::size_t n = 0;
    std::size_t edge_count = 0;
    std::size_t cloud_count = 0;
    double latency_ms = 0.0;
    double latency_sd = 0.0;
    double energy_j = 0.0;
    double energy_sd = 0.0;
    double accuracy = 0.0;
    double accuracy_sd = 0.0;
    int replicates = 1;

    double edge_fraction() const noexcept { return n == 0 ? 0.0 : static_cast<double>(edge_count) / n; }
};

/// Means of one run. Standard deviations are left at 0.
StrategySummary summarize(StrategyKind kind, std::span<const ExecutionRecord> records);

/// Mean of replicate means; sd is the sample sd across replicate means
/// (0 for a single replicate). Counts are summed.
StrategySummary combine_replicates(std::span<const StrategySummary> replicates);

struct QuintileSummary {
    Quintile quintile = Quintile::Q1;
    std::size_t n = 0;
    std::size_t edge_count = 0;
    double edge_fraction = 0.0;
    double accuracy = 0.0;

    /// Empty buckets are reported as absent.
    bool present() const noexcept { return n > 0; }
};

std::array<QuintileSummary, 5> run_quintile_analysis(std::span<const ExecutionRecord> records);

struct SweepPoint {
    double bandwidth_mbps = 0.0;
    double transfer_ms = 0.0;
    std::size_t n = 0;
    double latency_ms = 0.0;
    double edge_fraction = 0.0;
    double accuracy = 0.0;
};

struct RunReport {
    std::vector<StrategySummary> strategies;
    /// Per-quintile view of the first replicate of INAR-VL (or of the first
    /// strategy when INAR-VL is not part of the run).
    std::array<QuintileSummary, 5> quintiles{};
    std::vector<SweepPoint> sweep;

    const StrategySummary& row(StrategyKind kind) const;
};

struct BenchConfig {
    PoolConfig pool;
    CalibratedBundle bundle;
    NetworkState network;
    TruthConfig truth;
    TierCostModel cost;
    RunSeeds seeds;
    int replicates = 5;
    std::string static_edge = "qwen3-vl-2b";
    std::string static_cloud = "qwen3-vl-8b";
    bool allow_unfrozen = false;
};

/// Throws UnfrozenBundle unless the bundle is frozen and its hash verifies,
/// or allow_unfrozen is set.
void require_frozen(const BenchConfig& config);

/// Quintile boundaries the bundle carries.
ExecutionContext make_context(const BenchConfig& config, StrategyKind kind);

/// Simulated comparison: each strategy over `replicates` outcome/latency
/// seed replicates on the same workload.
RunReport run_comparison(std::span<const Request> requests, std::span<const StrategyKind> strategies,
                         const BenchConfig& config);

/// Replay comparison: one pass per strategy over the trace's outcomes.
RunReport run_comparison(const ReplayTrace& trace, std::span<const StrategyKind> strategies,
                         const BenchConfig& config);

/// Bandwidths must be ascending (BadSpec otherwise).
std::vector<SweepPoint> run_bandwidth_sweep(std::span<const Request> requests, StrategyKind strategy,
                                            std::span<const double> bandwidths, const BenchConfig& config);

/// Sets the edge and cloud overheads so EdgeOnly and CloudOnly reproduce the
/// target tier means on this workload (overheads shift latency linearly).
TierCostModel anchor_overheads(std::span<const Request> requests, const BenchConfig& config, double edge_target_ms,
                               double cloud_target_ms);

void write_strategy_csv(std::ostream& os, std::span<const StrategySummary> rows);
void write_quintile_csv(std::ostream& os, const std::array<QuintileSummary, 5>& rows);
void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> rows);

nlohmann::json to_json(const StrategySummary& s);
nlohmann::json to_json(const RunReport& report);

}  // namespace inar
