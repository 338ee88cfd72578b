#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inar/features.hpp"
#include "inar/model_pool.hpp"
#include "inar/router.hpp"

namespace inar {

/// One observed answer score for a model at a resolution.
struct Outcome {
    std::string model_id;
    int resolution = 0;
    /// Correctness in {0,1} or a soft score in [0,1].
    double score = 0.0;
};

/// A held-out request with raw features and per-model outcomes. Raw features
/// (not a fused descriptor) are kept so text weights can be refitted.
struct CalibrationRecord {
    std::string id;
    ImageQuality image;
    TextAxes text_axes{};
    std::vector<Outcome> outcomes;
};

/// Throws PartialCoverage unless every pool model has at least one outcome,
/// and SchemaMismatch for out-of-range scores or unknown models.
void validate_record(const CalibrationRecord& record, const PoolConfig& pool);

/// calrec/1 JSON Lines.
std::vector<CalibrationRecord> read_calibration_records(const std::filesystem::path& path, const PoolConfig& pool);
void write_calibration_records(const std::filesystem::path& path, std::span<const CalibrationRecord> records);
nlohmann::json to_json(const CalibrationRecord& record);
CalibrationRecord calibration_record_from_json(const nlohmann::json& j);

struct AccuracyEstimate {
    double accuracy = 0.0;
    std::size_t count = 0;
};

/// Mean outcome of one model, optionally restricted to one resolution.
/// Throws NoRecords when nothing matches.
AccuracyEstimate estimate_accuracy(std::span<const CalibrationRecord> records, std::string_view model_id,
                                   std::optional<int> resolution = std::nullopt);

struct ModelCalibration {
    /// Intercept a_m used by the quality predictor.
    double a_m = 0.0;
    /// Raw mean outcome at the calibration resolution.
    double measured = 0.0;
    std::size_t count = 0;
};

struct Provenance {
    std::uint64_t seed = 0;
    std::size_t records = 0;
    std::string timestamp;
};

/// Everything the router needs beyond the pool, frozen after calibration.
struct CalibratedBundle {
    std::map<std::string, ModelCalibration> models;
    TextWeights beta = kUniformTextWeights;
    FusionWeights weights;
    RouterParams router;
    QuintileBoundaries quintiles = kEvenQuintiles;
    Provenance provenance;
    bool frozen = false;
    std::string hash;
};

/// Uncalibrated defaults seeded from the pool's shipped accuracies.
CalibratedBundle default_bundle(const PoolConfig& pool);

/// Copies calibrated intercepts into the pool profiles.
PoolConfig apply_bundle(const PoolConfig& pool, const CalibratedBundle& bundle);

/// Fusion config for feature extraction under this bundle.
FeatureConfig feature_config(const CalibratedBundle& bundle, const ImageConfig& image = {});

/// Build a descriptor from raw features under this bundle's weights.
RequestDescriptor describe(const ImageQuality& image, const TextAxes& text_axes, const CalibratedBundle& bundle);

/// SHA-256 over the canonical document without the hash field.
std::string content_hash(const CalibratedBundle& bundle);
void freeze(CalibratedBundle& bundle);
/// True when frozen and the stored hash matches the content.
bool verify(const CalibratedBundle& bundle);

/// bundle/1
nlohmann::json to_json(const CalibratedBundle& bundle);
CalibratedBundle bundle_from_json(const nlohmann::json& doc);
CalibratedBundle load_bundle_file(const std::filesystem::path& path);

struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};

struct FitOptions {
    GridAxis detail_res_scale{0.0, 0.5, 0.01};
    /// Lattice step for beta; candidates use at most `beta_max_free_axes`
    /// nonzero axes. The starting beta is always a candidate.
    double beta_step = 0.05;
    int beta_max_free_axes = 3;
    bool fit_beta = true;
    bool fit_res_coeff = false;
    GridAxis res_coeff{0.0, 0.14, 0.01};
    bool fit_kappa = false;
    GridAxis kappa{0.0, 2.0, 0.1};
    int max_rounds = 8;
    std::uint64_t seed = 0;
};

struct FitReport {
    double loss = 0.0;
    int rounds = 0;
    bool res_coeff_identifiable = false;
    bool detail_res_identifiable = false;
    std::size_t pairs = 0;
};

/// Coordinate grid search minimizing the mean squared error between predicted
/// quality and observed outcomes over every (record, model, resolution)
/// triple. Per-model intercepts a_m are re-anchored for each candidate so the
/// predictor is unbiased at the calibration resolution. Coefficients are
/// projected onto the monotonic constraints (all >= 0). Throws NoRecords,
/// InsufficientCoverage, or ConstraintViolation (empty search space).
CalibratedBundle fit_coefficients(std::span<const CalibrationRecord> records, const PoolConfig& pool,
                                  const CalibratedBundle& initial, const FitOptions& options = {},
                                  FitReport* report = nullptr);

/// Fraction of requests the bundle's rule keeps on the edge.
double edge_fraction(std::span<const RequestDescriptor> descriptors, const PoolConfig& pool,
                     const NetworkState& network, const RouterParams& params);

/// Bisects tau_edge until the edge fraction is within `tolerance` of
/// `target`. Returns -infinity for target >= 1. Throws TargetUnreachable when
/// the attainable range does not bracket the target.
double fit_tau_edge(std::span<const RequestDescriptor> descriptors, const PoolConfig& pool,
                    const NetworkState& network, const RouterParams& params, double target = 0.36,
                    double tolerance = 0.02);

/// Post-hoc check of the monotonic constraints, independent of the fitter:
/// quality non-decreasing in resolution, non-increasing in each need, and
/// complexity costs weaker models at least as much as stronger ones.
/// Throws ConstraintViolation naming the first broken constraint.
void validate_constraints(const CalibratedBundle& bundle, const PoolConfig& pool);

}  // namespace inar
