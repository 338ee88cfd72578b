#include "inar/simulator.hpp"

#include <cmath>

#include "inar/error.hpp"

namespace inar {

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
    std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stable_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

SimulatedSource::SimulatedSource(TruthConfig truth, TierCostModel cost, NetworkState network, RunSeeds seeds)
    : truth_(std::move(truth)), cost_(cost), network_(network), seeds_(seeds) {}

double SimulatedSource::score(const Request& request, const ModelProfile& model, int resolution) const {
    return true_outcome(request, model, resolution, truth_, seeds_.outcome) ? 1.0 : 0.0;
}

double SimulatedSource::latency_ms(const Request& request, const ModelProfile& model, Tier placement) const {
    return simulate_latency(request, model, placement, cost_, network_, seeds_.latency);
}

double SimulatedSource::energy_j(const Request& request, const ModelProfile& model, Tier placement) const {
    return simulate_energy(request, model, placement, cost_, seeds_.latency);
}

nlohmann::json to_json(const ExecutionRecord& r) {
    return {{"schema", "exec/1"},
            {"id", r.request_id},
            {"strategy", to_string(r.strategy)},
            {"model", r.model_id},
            {"resolution", r.resolution},
            {"placement", to_string(r.placement)},
            {"reason", to_string(r.reason)},
            {"score", r.score},
            {"latency_ms", r.latency_ms},
            {"energy_j", r.energy_j},
            {"d", r.complexity},
            {"quintile", to_string(r.quintile)}};
}

std::vector<ExecutionRecord> execute(std::span<const Request> requests, const ExecutionContext& context,
                                     const OutcomeSource& source) {
    const PoolConfig pool = apply_bundle(context.pool, context.bundle);
    const bool guard = context.network.guard_active();
    std::vector<ModelScore> scores;
    std::vector<ExecutionRecord> out;
    out.reserve(requests.size());

    PoolConfig oracle_pool = pool;
    if (context.strategy.kind == StrategyKind::Oracle && guard) {
        std::erase_if(oracle_pool.profiles, [](const ModelProfile& m) { return m.tier != Tier::Edge; });
        if (oracle_pool.profiles.empty()) throw Error(ErrorCode::NoEdgeCandidate, "oracle: no edge model");
    }

    for (const auto& request : requests) {
        const RequestDescriptor descriptor = describe(request.image, request.text_axes, context.bundle);
        ExecutionRecord rec;
        rec.request_id = request.id;
        rec.strategy = context.strategy.kind;
        rec.complexity = descriptor.complexity;
        rec.quintile = complexity_quintile(descriptor.complexity, context.boundaries);

        const ModelProfile* model = nullptr;
        if (context.strategy.kind == StrategyKind::Oracle) {
            scores.clear();
            for (const auto& m : oracle_pool.profiles) {
                scores.push_back({m.id, source.score(request, m, m.calibration_resolution)});
            }
            const ModelScore best = oracle_select(scores, oracle_pool);
            model = &pool.at(best.model_id);
            rec.resolution = model->calibration_resolution;
            rec.placement = model->tier;
            rec.reason = guard ? DecisionReason::BandwidthGuard : DecisionReason::Hindsight;
            rec.score = best.score;
        } else {
            const RoutingDecision d =
                select(context.strategy, descriptor, pool, context.network, context.bundle.router);
            model = &pool.at(d.chosen.config.model_id);
            rec.resolution = d.chosen.config.resolution;
            rec.placement = d.chosen.config.placement;
            rec.reason = d.reason;
            rec.score = source.score(request, *model, rec.resolution);
        }
        rec.model_id = model->id;
        rec.latency_ms = source.latency_ms(request, *model, rec.placement);
        rec.energy_j = source.energy_j(request, *model, rec.placement);
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<ExecutionRecord> simulate(std::span<const Request> requests, const ExecutionContext& context,
                                      const TruthConfig& truth, const TierCostModel& cost, const RunSeeds& seeds) {
    const SimulatedSource source(truth, cost, context.network, seeds);
    return execute(requests, context, source);
}

}  // namespace inar
