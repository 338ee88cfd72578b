#pragma once

#include <array>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "inar/features.hpp"
#include "inar/model_pool.hpp"

namespace inar {

/// Coefficients of the quality predictor.
struct QualityParams {
    /// Gain per doubling of resolution relative to the calibration resolution.
    double res_coeff = 0.07;
    /// Weight of the squared need-strength gaps.
    double kappa = 1.0;
    /// Detail-resolution penalty: -scale * s_detail * max(0, (ref - r) / ref).
    double detail_res_scale = 0.1;
    double detail_res_ref = 336.0;
    /// Additive adjustment when a candidate runs at a precision other than the
    /// model's calibration precision, indexed by Precision.
    std::array<double, 2> precision_delta{0.0, 0.0};
};

/// Coefficients of the cost estimator.
struct CostParams {
    double energy_weight = 0.3;
    double cloud_energy = 0.1;
    double int8_factor = 0.65;
    double fp16_factor = 1.0;
    double resolution_anchor = 336.0;
    double network_coeff = 0.5;
    double network_bw_scale = 100.0;
    double bandwidth_floor_mbps = 10.0;

    double precision_factor(Precision p) const noexcept { return p == Precision::Int8 ? int8_factor : fp16_factor; }
};

/// Edge-preferring selection thresholds.
struct DecisionRule {
    /// Best edge candidate at or above this predicted quality is accepted.
    double tau_edge = 0.62;
    /// Minimum predicted gain to justify offloading.
    double delta_min = 0.03;
};

struct RouterParams {
    QualityParams quality;
    CostParams cost;
    DecisionRule rule;
};

struct ScoredCandidate {
    Configuration config;
    /// Unclamped predicted quality.
    double quality = 0.0;
    double cost = 0.0;
};

enum class DecisionReason {
    BandwidthGuard,
    EdgeSufficient,
    CloudJustified,
    CloudGainTooSmall,
    /// Single-tier strategies: placement fixed by the strategy itself.
    TierPinned,
    /// Oracle: picked from observed outcomes.
    Hindsight,
};

const char* to_string(DecisionReason r) noexcept;

struct RoutingDecision {
    ScoredCandidate chosen;
    std::vector<ScoredCandidate> frontier;
    DecisionReason reason = DecisionReason::EdgeSufficient;
    double tau_edge = 0.0;
    double delta_min = 0.0;
};

/// Per-axis shortfall max(0, need - strength).
std::array<double, 3> capability_gaps(const Needs& needs, const Strengths& strengths);

/// Detail-resolution penalty term (always <= 0).
double detail_resolution_penalty(double detail, int resolution, const QualityParams& params);

double predict_quality(const Configuration& config, const RequestDescriptor& descriptor, const ModelProfile& profile,
                       const QualityParams& params);

double estimate_cost(const Configuration& config, const ModelProfile& profile, const NetworkState& network,
                     const CostParams& params);

std::vector<ScoredCandidate> score_candidates(const RequestDescriptor& descriptor, const PoolConfig& pool,
                                              const NetworkState& network, const RouterParams& params);

/// Canonical candidate order: cost ascending, then quality descending, then
/// edge before cloud, then model id, then resolution.
bool candidate_order(const ScoredCandidate& a, const ScoredCandidate& b) noexcept;

/// Cost-sorted subset with strictly increasing quality. Throws EmptyCandidates.
std::vector<ScoredCandidate> pareto_frontier(std::vector<ScoredCandidate> scored);

/// Applies the bandwidth guard and the edge-preference rule to a frontier.
/// Throws EmptyCandidates, or NoEdgeCandidate when the guard is active and the
/// frontier holds no edge configuration.
RoutingDecision decide(std::vector<ScoredCandidate> frontier, const NetworkState& network, const DecisionRule& rule);

/// candidates -> score -> frontier -> decide.
RoutingDecision route(const RequestDescriptor& descriptor, const PoolConfig& pool, const NetworkState& network,
                      const RouterParams& params);

nlohmann::json to_json(const ScoredCandidate& c);
/// decision/1
nlohmann::json to_json(const RoutingDecision& d);

}  // namespace inar
