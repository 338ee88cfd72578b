#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "inar/error.hpp"
#include "inar/simulator.hpp"

namespace inar {

namespace {

constexpr double kZ95 = 1.6448536269514722;
constexpr std::uint64_t kGpuTag = 0x677075ULL;
constexpr std::uint64_t kRoutingTag = 0x726f757465ULL;
constexpr std::uint64_t kEnergyTag = 0x656e65726779ULL;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t request_id, std::uint64_t tag) {
    return std::mt19937_64(mix_seed(mix_seed(seed, request_id), tag));
}

TierEnergy energy_from_json(const nlohmann::json& j) {
    return {j.at("mean_j").get<double>(), j.at("sd_j").get<double>()};
}

}  // namespace

LogNormal fit_lognormal(double mean, double p95) {
    if (!(mean > 0.0) || !(p95 >= mean)) {
        throw Error(ErrorCode::BadSpec, "log-normal fit needs 0 < mean <= p95");
    }
    // ln p95 = mu + z sigma and ln mean = mu + sigma^2 / 2, so
    // sigma^2 / 2 - z sigma + ln(p95 / mean) = 0; take the smaller root.
    const double disc = kZ95 * kZ95 - 2.0 * std::log(p95 / mean);
    if (disc < 0.0) throw Error(ErrorCode::BadSpec, "p95 too far above the mean for a log-normal");
    const double sigma = kZ95 - std::sqrt(disc);
    return {std::log(mean) - 0.5 * sigma * sigma, sigma};
}

TierCostModel cost_model_from_json(const nlohmann::json& doc) {
    TierCostModel c;
    try {
        if (doc.contains("schema") && doc["schema"] != "cost/1") {
            throw Error(ErrorCode::SchemaMismatch, "cost: expected schema \"cost/1\"");
        }
        c.edge_overhead_ms = doc.value("edge_overhead_ms", c.edge_overhead_ms);
        c.cloud_overhead_ms = doc.value("cloud_overhead_ms", c.cloud_overhead_ms);
        c.routing_min_ms = doc.value("routing_min_ms", c.routing_min_ms);
        c.routing_max_ms = doc.value("routing_max_ms", c.routing_max_ms);
        c.payload_bytes = doc.value("payload_bytes", c.payload_bytes);
        if (doc.contains("edge_energy")) c.edge_energy = energy_from_json(doc["edge_energy"]);
        if (doc.contains("cloud_energy")) c.cloud_energy = energy_from_json(doc["cloud_energy"]);
        c.idle_power_w = doc.value("idle_power_w", c.idle_power_w);
        c.power_period_ms = doc.value("power_period_ms", c.power_period_ms);
        c.noise = doc.value("noise", c.noise);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadSpec, std::string("cost: ") + e.what());
    }
    if (c.routing_min_ms < 0.0 || c.routing_max_ms < c.routing_min_ms) {
        throw Error(ErrorCode::BadSpec, "cost: routing range must satisfy 0 <= min <= max");
    }
    if (c.payload_bytes < 0.0 || c.power_period_ms <= 0.0) throw Error(ErrorCode::BadSpec, "cost: bad payload or period");
    return c;
}

nlohmann::json to_json(const TierCostModel& c) {
    return {{"schema", "cost/1"},
            {"edge_overhead_ms", c.edge_overhead_ms},
            {"cloud_overhead_ms", c.cloud_overhead_ms},
            {"routing_min_ms", c.routing_min_ms},
            {"routing_max_ms", c.routing_max_ms},
            {"payload_bytes", c.payload_bytes},
            {"edge_energy", {{"mean_j", c.edge_energy.mean_j}, {"sd_j", c.edge_energy.sd_j}}},
            {"cloud_energy", {{"mean_j", c.cloud_energy.mean_j}, {"sd_j", c.cloud_energy.sd_j}}},
            {"idle_power_w", c.idle_power_w},
            {"power_period_ms", c.power_period_ms},
            {"noise", c.noise}};
}

double transfer_latency_ms(double payload_bytes, double bandwidth_mbps) {
    if (bandwidth_mbps <= 0.0) return std::numeric_limits<double>::infinity();
    return payload_bytes * 8.0 / (bandwidth_mbps * 1e6) * 1000.0;
}

RunSeeds RunSeeds::replicate(int k) const noexcept {
    if (k == 0) return *this;
    return {mix_seed(outcome, static_cast<std::uint64_t>(k)), mix_seed(latency, static_cast<std::uint64_t>(k))};
}

double simulate_latency(const Request& request, const ModelProfile& model, Tier placement, const TierCostModel& cost,
                        const NetworkState& network, std::uint64_t seed) {
    double gpu = model.gpu_latency_mean_ms;
    double routing = 0.5 * (cost.routing_min_ms + cost.routing_max_ms);
    if (cost.noise) {
        const LogNormal ln = fit_lognormal(model.gpu_latency_mean_ms, model.gpu_latency_p95_ms);
        auto rng = stream(seed, request.id, mix_seed(kGpuTag, stable_hash(model.id)));
        std::lognormal_distribution<double> dist(ln.mu, ln.sigma);
        gpu = ln.sigma > 0.0 ? dist(rng) : model.gpu_latency_mean_ms;
        auto route_rng = stream(seed, request.id, kRoutingTag);
        std::uniform_real_distribution<double> uni(cost.routing_min_ms, cost.routing_max_ms);
        routing = uni(route_rng);
    }
    if (placement == Tier::Edge) return gpu + routing + cost.edge_overhead_ms;
    return gpu + routing + cost.cloud_overhead_ms + transfer_latency_ms(cost.payload_bytes, network.bandwidth_mbps);
}

double simulate_energy(const Request& request, const ModelProfile& model, Tier placement, const TierCostModel& cost,
                       std::uint64_t seed) {
    const TierEnergy& e = placement == Tier::Edge ? cost.edge_energy : cost.cloud_energy;
    if (!cost.noise || e.sd_j <= 0.0) return e.mean_j;
    auto rng = stream(seed, request.id, mix_seed(kEnergyTag, stable_hash(model.id)));
    std::normal_distribution<double> dist(e.mean_j, e.sd_j);
    return std::max(0.0, dist(rng));
}

double integrate_energy(const PowerTrace& trace) {
    const auto& s = trace.samples;
    if (s.size() < 2) throw Error(ErrorCode::ShortTrace, "power trace needs at least two samples");
    double joules = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double dt = s[i].t_ms - s[i - 1].t_ms;
        if (!(dt > 0.0)) throw Error(ErrorCode::BadTrace, "timestamps must be strictly increasing");
        const double e0 = s[i - 1].watts - trace.idle_w;
        const double e1 = s[i].watts - trace.idle_w;
        double area = 0.0;  // W*ms
        if (e0 >= 0.0 && e1 >= 0.0) {
            area = 0.5 * (e0 + e1) * dt;
        } else if (e0 > 0.0) {
            area = 0.5 * e0 * dt * e0 / (e0 - e1);
        } else if (e1 > 0.0) {
            area = 0.5 * e1 * dt * e1 / (e1 - e0);
        }
        joules += area / 1000.0;
    }
    return joules;
}

PowerTrace synthesize_power_trace(double duration_ms, double dynamic_energy_j, double idle_w, double period_ms) {
    if (!(duration_ms > 0.0) || !(period_ms > 0.0) || dynamic_energy_j < 0.0) {
        throw Error(ErrorCode::BadTrace, "power trace needs positive duration and period");
    }
    PowerTrace trace;
    trace.idle_w = idle_w;
    const double level = idle_w + dynamic_energy_j * 1000.0 / duration_ms;
    for (double t = 0.0; t < duration_ms; t += period_ms) trace.samples.push_back({t, level});
    trace.samples.push_back({duration_ms, level});
    return trace;
}

}  // namespace inar
