#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inar/bench.hpp"
#include "inar/calibration.hpp"
#include "inar/config.hpp"
#include "inar/model_pool.hpp"
#include "inar/simulator.hpp"

namespace inar {

/// Every document a run reads, after config overrides are applied.
struct Inputs {
    PoolConfig pool;
    CalibratedBundle bundle;
    TruthConfig truth;
    TierCostModel cost;
    WorkloadSpec workload;
};

/// Loads pool, truth, cost and workload, plus the bundle when `with_bundle`
/// (otherwise the pool defaults). Router overrides from the config (kappa,
/// res_coeff, delta_min, tau_edge) are written into the bundle, which then
/// no longer verifies against its hash.
Inputs load_inputs(const RunConfig& config, bool with_bundle = true);

BenchConfig make_bench_config(const Inputs& inputs, const RunConfig& config);

/// The held-out calibration workload: same mixture, a different seed.
WorkloadSpec calibration_workload(const WorkloadSpec& reference, std::size_t n);

/// Records for the held-out calibration workload, drawn from the hidden
/// generator under a seed derived from (but distinct from) `outcome_seed`.
std::vector<CalibrationRecord> synthesize_reference_records(const Inputs& inputs, std::size_t n,
                                                            std::uint64_t outcome_seed);

struct CalibrationSettings {
    std::size_t n_records = 1000;
    double target_edge_fraction = 0.36;
    double tolerance = 0.02;
    NetworkState network;
    FitOptions fit;
};

struct CalibrationRun {
    CalibratedBundle bundle;
    FitReport report;
    double edge_fraction = 0.0;
};

/// Fits coefficients on `records`, then takes the quintile cuts from the
/// reference workload and places tau_edge so the rule keeps the target
/// fraction of it on the edge. Returns a frozen bundle.
CalibrationRun calibrate(std::span<const CalibrationRecord> records, std::span<const Request> reference,
                         const PoolConfig& pool, const CalibrationSettings& settings, std::uint64_t seed);

/// Run manifest: command, effective config, input paths with content hashes,
/// seeds, and output hashes.
nlohmann::json make_manifest(const std::string& command, const RunConfig& config, const Inputs& inputs,
                             const std::map<std::string, std::filesystem::path>& input_files,
                             const std::map<std::string, std::filesystem::path>& outputs);

std::string artifact_version();

}  // namespace inar
