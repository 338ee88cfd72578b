#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "inar/calibration.hpp"
#include "inar/features.hpp"
#include "inar/model_pool.hpp"
#include "inar/router.hpp"
#include "inar/strategies.hpp"

namespace inar {

// ---------------------------------------------------------------------------
// Deterministic random streams

/// splitmix64 finalizer over the combined inputs.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;
std::uint64_t stable_hash(std::string_view text) noexcept;

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

// ---------------------------------------------------------------------------
// Workloads

/// One feature axis: Beta(mean * concentration, (1 - mean) * concentration)
/// marginal, coupled to a per-request latent difficulty through a Gaussian
/// copula with the given loading in [-1, 1]. Mean 0 or 1 pins the axis.
struct AxisSpec {
    double mean = 0.5;
    double concentration = 8.0;
    double loading = 0.0;
};

struct WorkloadSpec {
    std::uint64_t seed = 42;
    std::size_t n_requests = 2000;
    /// blur, exposure, artifacts, detail (quality scores, 1 = best).
    std::array<AxisSpec, 4> image{};
    /// length, entity density, question type, vocabulary, reasoning, context.
    std::array<AxisSpec, kTextAxisCount> text{};
    /// Render procedural images and templated questions, then extract
    /// features from them instead of sampling features directly.
    bool raw_images = false;
    int raw_image_size = 96;
};

/// Throws BadSpec.
void validate(const WorkloadSpec& spec);
WorkloadSpec workload_spec_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const WorkloadSpec& spec);

struct Request {
    std::uint64_t id = 0;
    ImageQuality image;
    TextAxes text_axes{};
    /// Only populated in raw-image mode.
    std::string question;
};

std::vector<Request> generate_workload(const WorkloadSpec& spec, const ImageConfig& image_config = {});

/// Raw-mode building block: a procedural scene degraded according to the four
/// quality levels (each in [0,1], 1 = pristine) plus a templated question whose
/// difficulty grows with `text_level`.
struct RawRequest {
    GrayImage image;
    std::string question;
};
RawRequest render_raw_request(std::uint64_t seed, int size, double blur_quality, double exposure_quality,
                              double artifact_quality, double detail_level, double text_level);

// ---------------------------------------------------------------------------
// Hidden outcome generator

/// Coefficients of the synthetic answer-correctness generator. Deliberately
/// separate from any router bundle.
struct TruthConfig {
    std::map<std::string, double> base;
    std::map<std::string, double> targets;
    double res_coeff = 0.05;
    double kappa = 0.8;
    double detail_res_scale = 0.3;
    double detail_res_ref = 448.0;
    TextWeights beta{0.10, 0.10, 0.15, 0.15, 0.30, 0.20};
    FusionWeights weights;
    /// Scale of the logistic perturbation added to each success probability.
    double noise_scale = 0.05;
    /// Correlation of correctness draws across models on the same request.
    double model_correlation = 0.5;
};

TruthConfig truth_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TruthConfig& truth);

/// Success probability of `model` at `resolution` on `request`.
double success_probability(const Request& request, const ModelProfile& model, int resolution,
                           const TruthConfig& truth, std::uint64_t seed);

/// Bernoulli draw keyed by (seed, request id, model id); resolution only moves
/// the probability, so draws are coupled across resolutions.
bool true_outcome(const Request& request, const ModelProfile& model, int resolution, const TruthConfig& truth,
                  std::uint64_t seed);

/// Sets truth.base so each model's mean success probability at its
/// calibration resolution over `requests` equals truth.targets.
void solve_truth_bases(TruthConfig& truth, std::span<const Request> requests, const PoolConfig& pool,
                       std::uint64_t seed);

/// Calibration records with a drawn outcome for every pool model at every
/// supported resolution.
std::vector<CalibrationRecord> synthesize_calibration_records(std::span<const Request> requests,
                                                              const PoolConfig& pool, const TruthConfig& truth,
                                                              std::uint64_t seed);

// ---------------------------------------------------------------------------
// Latency and energy

struct LogNormal {
    double mu = 0.0;
    double sigma = 0.0;
};

/// Log-normal with the given mean and 95th percentile.
LogNormal fit_lognormal(double mean, double p95);

struct TierEnergy {
    double mean_j = 0.0;
    double sd_j = 0.0;
};

struct TierCostModel {
    /// Host-side time added to every edge execution.
    double edge_overhead_ms = 0.0;
    /// Fixed tunnel/network round trip added to every cloud execution.
    double cloud_overhead_ms = 2000.0;
    double routing_min_ms = 10.0;
    double routing_max_ms = 30.0;
    double payload_bytes = 250'000.0;
    TierEnergy edge_energy{7.4, 0.6};
    TierEnergy cloud_energy{26.0, 1.5};
    double idle_power_w = 12.0;
    double power_period_ms = 50.0;
    /// false: every draw is replaced by its mean.
    bool noise = true;
};

TierCostModel cost_model_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const TierCostModel& cost);

/// payload * 8 / (bandwidth * 1e6) seconds, in milliseconds.
double transfer_latency_ms(double payload_bytes, double bandwidth_mbps);

struct RunSeeds {
    std::uint64_t outcome = 1;
    std::uint64_t latency = 2;

    RunSeeds replicate(int k) const noexcept;
};

double simulate_latency(const Request& request, const ModelProfile& model, Tier placement, const TierCostModel& cost,
                        const NetworkState& network, std::uint64_t seed);
double simulate_energy(const Request& request, const ModelProfile& model, Tier placement, const TierCostModel& cost,
                       std::uint64_t seed);

struct PowerSample {
    double t_ms = 0.0;
    double watts = 0.0;
};

struct PowerTrace {
    std::vector<PowerSample> samples;
    double idle_w = 0.0;
};

/// Joules above idle: integral of max(0, P - P_idle) over the piecewise-linear
/// trace. Throws ShortTrace below two samples and BadTrace for non-increasing
/// timestamps.
double integrate_energy(const PowerTrace& trace);

/// A flat-topped trace at the sampling period whose above-idle integral is
/// `dynamic_energy_j` over `duration_ms`.
PowerTrace synthesize_power_trace(double duration_ms, double dynamic_energy_j, double idle_w, double period_ms);

// ---------------------------------------------------------------------------
// Execution

/// Where per-request outcomes, latencies and energies come from.
class OutcomeSource {
public:
    virtual ~OutcomeSource() = default;
    virtual double score(const Request& request, const ModelProfile& model, int resolution) const = 0;
    virtual double latency_ms(const Request& request, const ModelProfile& model, Tier placement) const = 0;
    virtual double energy_j(const Request& request, const ModelProfile& model, Tier placement) const = 0;
};

class SimulatedSource final : public OutcomeSource {
public:
    SimulatedSource(TruthConfig truth, TierCostModel cost, NetworkState network, RunSeeds seeds);

    double score(const Request& request, const ModelProfile& model, int resolution) const override;
    double latency_ms(const Request& request, const ModelProfile& model, Tier placement) const override;
    double energy_j(const Request& request, const ModelProfile& model, Tier placement) const override;

private:
    TruthConfig truth_;
    TierCostModel cost_;
    NetworkState network_;
    RunSeeds seeds_;
};

struct ExecutionRecord {
    std::uint64_t request_id = 0;
    StrategyKind strategy = StrategyKind::InarVl;
    std::string model_id;
    int resolution = 0;
    Tier placement = Tier::Edge;
    DecisionReason reason = DecisionReason::EdgeSufficient;
    double score = 0.0;
    double latency_ms = 0.0;
    double energy_j = 0.0;
    double complexity = 0.0;
    Quintile quintile = Quintile::Q1;
};

/// exec/1
nlohmann::json to_json(const ExecutionRecord& record);

struct ExecutionContext {
    PoolConfig pool;
    CalibratedBundle bundle;
    NetworkState network;
    QuintileBoundaries boundaries = kEvenQuintiles;
    Strategy strategy;
};

/// Routes every request with the context's strategy and reads outcomes from
/// `source`. The oracle reads every model's outcome at its calibration
/// resolution and keeps the best (edge models only under the guard).
std::vector<ExecutionRecord> execute(std::span<const Request> requests, const ExecutionContext& context,
                                     const OutcomeSource& source);

std::vector<ExecutionRecord> simulate(std::span<const Request> requests, const ExecutionContext& context,
                                      const TruthConfig& truth, const TierCostModel& cost, const RunSeeds& seeds);

}  // namespace inar
