#include "inar/router.hpp"

#include <algorithm>
#include <cmath>

#include "inar/error.hpp"

namespace inar {

const char* to_string(DecisionReason r) noexcept {
    switch (r) {
        case DecisionReason::BandwidthGuard: return "BandwidthGuard";
        case DecisionReason::EdgeSufficient: return "EdgeSufficient";
        case DecisionReason::CloudJustified: return "CloudJustified";
        case DecisionReason::CloudGainTooSmall: return "CloudGainTooSmall";
        case DecisionReason::TierPinned: return "TierPinned";
        case DecisionReason::Hindsight: return "Hindsight";
    }
    return "?";
}

std::array<double, 3> capability_gaps(const Needs& needs, const Strengths& strengths) {
    return {std::max(0.0, needs.blur - strengths.blur), std::max(0.0, needs.detail - strengths.detail),
            std::max(0.0, needs.reasoning - strengths.reasoning)};
}

double detail_resolution_penalty(double detail, int resolution, const QualityParams& params) {
    if (params.detail_res_ref <= 0.0) return 0.0;
    const double shortfall = std::max(0.0, (params.detail_res_ref - resolution) / params.detail_res_ref);
    return -params.detail_res_scale * detail * shortfall;
}

double predict_quality(const Configuration& config, const RequestDescriptor& descriptor, const ModelProfile& profile,
                       const QualityParams& params) {
    const double a = profile.accuracy;
    const double precision_adj =
        config.precision == profile.precision ? 0.0 : params.precision_delta[static_cast<std::size_t>(config.precision)];
    const double res_term =
        params.res_coeff * (std::log2(static_cast<double>(config.resolution)) -
                            std::log2(static_cast<double>(profile.calibration_resolution)));
    double gap_penalty = 0.0;
    for (double g : capability_gaps(descriptor.needs, profile.strengths)) gap_penalty += g * g;
    return a + precision_adj + res_term - params.kappa * gap_penalty - descriptor.complexity * (1.0 - a) +
           detail_resolution_penalty(descriptor.image.detail, config.resolution, params);
}

double estimate_cost(const Configuration& config, const ModelProfile& profile, const NetworkState& network,
                     const CostParams& params) {
    const double f_prec = params.precision_factor(config.precision);
    const double scale = static_cast<double>(config.resolution) / params.resolution_anchor;
    const double scale_sq = scale * scale;
    const double compute = profile.base_latency * f_prec * scale_sq;
    if (config.placement == Tier::Edge) {
        return compute + params.energy_weight * profile.params_b * f_prec;
    }
    const double network_term = params.network_coeff * scale_sq * params.network_bw_scale /
                                std::max(network.bandwidth_mbps, params.bandwidth_floor_mbps);
    return compute + params.energy_weight * params.cloud_energy + network_term;
}

std::vector<ScoredCandidate> score_candidates(const RequestDescriptor& descriptor, const PoolConfig& pool,
                                              const NetworkState& network, const RouterParams& params) {
    std::vector<ScoredCandidate> out;
    for (const auto& config : candidates(pool, network)) {
        const ModelProfile& profile = pool.at(config.model_id);
        out.push_back({config, predict_quality(config, descriptor, profile, params.quality),
                       estimate_cost(config, profile, network, params.cost)});
    }
    return out;
}

bool candidate_order(const ScoredCandidate& a, const ScoredCandidate& b) noexcept {
    if (a.cost != b.cost) return a.cost < b.cost;
    if (a.quality != b.quality) return a.quality > b.quality;
    if (a.config.placement != b.config.placement) return a.config.placement == Tier::Edge;
    if (a.config.model_id != b.config.model_id) return a.config.model_id < b.config.model_id;
    return a.config.resolution < b.config.resolution;
}

std::vector<ScoredCandidate> pareto_frontier(std::vector<ScoredCandidate> scored) {
    if (scored.empty()) throw Error(ErrorCode::EmptyCandidates, "no candidates to rank");
    std::sort(scored.begin(), scored.end(), candidate_order);
    std::vector<ScoredCandidate> frontier;
    for (auto& c : scored) {
        if (frontier.empty() || c.quality > frontier.back().quality) frontier.push_back(std::move(c));
    }
    return frontier;
}

RoutingDecision decide(std::vector<ScoredCandidate> frontier, const NetworkState& network, const DecisionRule& rule) {
    if (frontier.empty()) throw Error(ErrorCode::EmptyCandidates, "empty frontier");
    RoutingDecision decision;
    decision.tau_edge = rule.tau_edge;
    decision.delta_min = rule.delta_min;

    // Frontier quality is strictly increasing, so the last member of a tier
    // is that tier's best.
    const ScoredCandidate* best_edge = nullptr;
    const ScoredCandidate* best_cloud = nullptr;
    for (const auto& c : frontier) {
        (c.config.placement == Tier::Edge ? best_edge : best_cloud) = &c;
    }

    if (network.guard_active()) {
        if (best_edge == nullptr) throw Error(ErrorCode::NoEdgeCandidate, "bandwidth guard active but no edge candidate");
        decision.chosen = *best_edge;
        decision.reason = DecisionReason::BandwidthGuard;
    } else if (best_edge == nullptr) {
        decision.chosen = *best_cloud;
        decision.reason = DecisionReason::CloudJustified;
    } else if (best_edge->quality >= rule.tau_edge) {
        decision.chosen = *best_edge;
        decision.reason = DecisionReason::EdgeSufficient;
    } else if (best_cloud != nullptr && best_cloud->quality - best_edge->quality > rule.delta_min) {
        decision.chosen = *best_cloud;
        decision.reason = DecisionReason::CloudJustified;
    } else {
        decision.chosen = *best_edge;
        decision.reason = DecisionReason::CloudGainTooSmall;
    }
    decision.frontier = std::move(frontier);
    return decision;
}

RoutingDecision route(const RequestDescriptor& descriptor, const PoolConfig& pool, const NetworkState& network,
                      const RouterParams& params) {
    return decide(pareto_frontier(score_candidates(descriptor, pool, network, params)), network, params.rule);
}

nlohmann::json to_json(const ScoredCandidate& c) {
    nlohmann::json j = c.config;
    j["q_hat"] = c.quality;
    j["c_hat"] = c.cost;
    return j;
}

nlohmann::json to_json(const RoutingDecision& d) {
    nlohmann::json frontier = nlohmann::json::array();
    for (const auto& c : d.frontier) frontier.push_back(to_json(c));
    nlohmann::json chosen = to_json(d.chosen);
    chosen["q_hat_clamped"] = std::clamp(d.chosen.quality, 0.0, 1.0);
    return {
        {"schema", "decision/1"},
        {"chosen", chosen},
        {"frontier", frontier},
        {"reason", to_string(d.reason)},
        {"thresholds", {{"tau_edge", d.tau_edge}, {"delta_min", d.delta_min}}},
    };
}

}  // namespace inar
