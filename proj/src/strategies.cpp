#include "inar/strategies.hpp"

#include <algorithm>

#include "inar/error.hpp"

namespace inar {

namespace {

RoutingDecision best_on_tier(Tier tier, const RequestDescriptor& descriptor, const PoolConfig& pool,
                             const NetworkState& network, const RouterParams& params) {
    auto scored = score_candidates(descriptor, pool, network, params);
    std::erase_if(scored, [&](const ScoredCandidate& c) { return c.config.placement != tier; });
    if (scored.empty()) {
        throw Error(tier == Tier::Edge ? ErrorCode::NoEdgeCandidate : ErrorCode::EmptyCandidates,
                    std::string("no ") + to_string(tier) + " candidates");
    }
    RoutingDecision d;
    d.frontier = pareto_frontier(std::move(scored));
    d.chosen = d.frontier.back();
    d.reason = DecisionReason::TierPinned;
    d.tau_edge = params.rule.tau_edge;
    d.delta_min = params.rule.delta_min;
    return d;
}

}  // namespace

const char* to_string(StrategyKind k) noexcept {
    switch (k) {
        case StrategyKind::EdgeOnly: return "edge";
        case StrategyKind::CloudOnly: return "cloud";
        case StrategyKind::InarVl: return "inar";
        case StrategyKind::TextOnly: return "text";
        case StrategyKind::ImageOnly: return "image";
        case StrategyKind::Static: return "static";
        case StrategyKind::Oracle: return "oracle";
    }
    return "?";
}

const char* display_name(StrategyKind k) noexcept {
    switch (k) {
        case StrategyKind::EdgeOnly: return "Edge-Only";
        case StrategyKind::CloudOnly: return "Cloud-Only";
        case StrategyKind::InarVl: return "INAR-VL";
        case StrategyKind::TextOnly: return "Text-Only";
        case StrategyKind::ImageOnly: return "Image-Only";
        case StrategyKind::Static: return "Static";
        case StrategyKind::Oracle: return "Oracle";
    }
    return "?";
}

StrategyKind parse_strategy(std::string_view name) {
    for (StrategyKind k : kAllStrategies) {
        if (name == to_string(k)) return k;
    }
    throw Error(ErrorCode::ParseError, "unknown strategy '" + std::string(name) + "'");
}

RequestDescriptor mask_descriptor(const RequestDescriptor& descriptor, StrategyKind kind) {
    if (kind == StrategyKind::TextOnly) {
        // Image fields are replaced by a neutral raster so nothing downstream
        // can read them.
        RequestDescriptor out = fuse(ImageQuality{}, descriptor.text, {0.0, 1.0});
        out.needs.blur = 0.0;
        out.needs.detail = 0.0;
        return out;
    }
    if (kind == StrategyKind::ImageOnly) {
        TextComplexity blank;
        blank.beta = descriptor.text.beta;
        RequestDescriptor out = fuse(descriptor.image, blank, {1.0, 0.0});
        out.needs.reasoning = 0.0;
        return out;
    }
    return descriptor;
}

PoolConfig strategy_pool(const Strategy& strategy, const PoolConfig& pool) {
    if (strategy.kind != StrategyKind::Static) return pool;
    const std::string pair[] = {strategy.static_edge, strategy.static_cloud};
    return pool.restricted_to(pair);
}

RoutingDecision select(const Strategy& strategy, const RequestDescriptor& descriptor, const PoolConfig& pool,
                       const NetworkState& network, const RouterParams& params) {
    switch (strategy.kind) {
        case StrategyKind::EdgeOnly:
            return best_on_tier(Tier::Edge, descriptor, pool, network, params);
        case StrategyKind::CloudOnly:
            if (network.guard_active()) {
                RoutingDecision d = best_on_tier(Tier::Edge, descriptor, pool, network, params);
                d.reason = DecisionReason::BandwidthGuard;
                return d;
            }
            return best_on_tier(Tier::Cloud, descriptor, pool, network, params);
        case StrategyKind::InarVl:
            return route(descriptor, pool, network, params);
        case StrategyKind::TextOnly:
        case StrategyKind::ImageOnly:
            return route(mask_descriptor(descriptor, strategy.kind), pool, network, params);
        case StrategyKind::Static:
            return route(descriptor, strategy_pool(strategy, pool), network, params);
        case StrategyKind::Oracle:
            break;
    }
    throw Error(ErrorCode::MissingOutcome, "the oracle strategy selects from outcomes, not descriptors");
}

ModelScore oracle_select(std::span<const ModelScore> outcomes, const PoolConfig& pool) {
    const ModelScore* best = nullptr;
    const ModelProfile* best_profile = nullptr;
    for (const auto& m : pool.profiles) {
        const auto it = std::find_if(outcomes.begin(), outcomes.end(),
                                     [&](const ModelScore& s) { return s.model_id == m.id; });
        if (it == outcomes.end()) throw Error(ErrorCode::MissingOutcome, "no outcome for '" + m.id + "'");
        bool better = best == nullptr || it->score > best->score;
        if (!better && it->score == best->score) {
            if (m.tier != best_profile->tier) {
                better = m.tier == Tier::Edge;
            } else {
                better = m.id < best_profile->id;
            }
        }
        if (better) {
            best = &*it;
            best_profile = &m;
        }
    }
    if (best == nullptr) throw Error(ErrorCode::MissingOutcome, "empty pool");
    return *best;
}

}  // namespace inar
