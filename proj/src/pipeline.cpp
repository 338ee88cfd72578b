#include "inar/pipeline.hpp"

#include <chrono>
#include <ctime>

#include "inar/document.hpp"
#include "inar/error.hpp"

namespace inar {

std::string artifact_version() { return "0.1.0"; }

Inputs load_inputs(const RunConfig& config, bool with_bundle) {
    Inputs in;
    in.pool = load_pool_file(config.pool);
    in.truth = truth_from_json(load_document(config.truth));
    in.cost = cost_model_from_json(load_document(config.cost));
    in.workload = workload_spec_from_json(load_document(config.workload));
    if (config.workload_seed) in.workload.seed = *config.workload_seed;
    if (config.n_requests) in.workload.n_requests = *config.n_requests;
    validate(in.workload);

    in.bundle = with_bundle ? load_bundle_file(config.bundle) : default_bundle(in.pool);
    auto& router = in.bundle.router;
    if (config.overridden("kappa")) router.quality.kappa = config.kappa;
    if (config.overridden("res_coeff")) router.quality.res_coeff = config.res_coeff;
    if (config.overridden("delta_min")) router.rule.delta_min = config.delta_min;
    if (config.tau_edge) router.rule.tau_edge = *config.tau_edge;
    return in;
}

BenchConfig make_bench_config(const Inputs& inputs, const RunConfig& config) {
    BenchConfig b;
    b.pool = inputs.pool;
    b.bundle = inputs.bundle;
    b.network = {config.bandwidth_mbps, config.guard_mbps};
    b.truth = inputs.truth;
    b.cost = inputs.cost;
    b.seeds = {config.outcome_seed, config.latency_seed};
    b.replicates = config.replicates;
    b.allow_unfrozen = config.allow_unfrozen;
    return b;
}

WorkloadSpec calibration_workload(const WorkloadSpec& reference, std::size_t n) {
    WorkloadSpec spec = reference;
    spec.seed = mix_seed(reference.seed, 0xca11b);
    spec.n_requests = n;
    return spec;
}

std::vector<CalibrationRecord> synthesize_reference_records(const Inputs& inputs, std::size_t n,
                                                            std::uint64_t outcome_seed) {
    const auto held_out = generate_workload(calibration_workload(inputs.workload, n));
    return synthesize_calibration_records(held_out, inputs.pool, inputs.truth, mix_seed(outcome_seed, 0xca1));
}

CalibrationRun calibrate(std::span<const CalibrationRecord> records, std::span<const Request> reference,
                         const PoolConfig& pool, const CalibrationSettings& settings, std::uint64_t seed) {
    CalibrationRun run;
    FitOptions options = settings.fit;
    options.seed = seed;
    run.bundle = fit_coefficients(records, pool, default_bundle(pool), options, &run.report);

    std::vector<RequestDescriptor> descriptors;
    descriptors.reserve(reference.size());
    for (const auto& r : reference) descriptors.push_back(describe(r.image, r.text_axes, run.bundle));
    std::vector<double> complexities;
    complexities.reserve(descriptors.size());
    for (const auto& d : descriptors) complexities.push_back(d.complexity);
    run.bundle.quintiles = empirical_quintile_boundaries(complexities);
    const PoolConfig routed = apply_bundle(pool, run.bundle);
    run.bundle.router.rule.tau_edge = fit_tau_edge(descriptors, routed, settings.network, run.bundle.router,
                                                   settings.target_edge_fraction, settings.tolerance);
    run.edge_fraction = edge_fraction(descriptors, routed, settings.network, run.bundle.router);
    run.bundle.provenance.seed = seed;
    run.bundle.provenance.records = records.size();
    freeze(run.bundle);
    return run;
}

nlohmann::json make_manifest(const std::string& command, const RunConfig& config, const Inputs& inputs,
                             const std::map<std::string, std::filesystem::path>& input_files,
                             const std::map<std::string, std::filesystem::path>& outputs) {
    nlohmann::json in = nlohmann::json::object();
    for (const auto& [name, path] : input_files) {
        in[name] = {{"path", path.string()}, {"sha256", file_sha256(path)}};
    }
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, path] : outputs) {
        out[name] = {{"path", path.string()}, {"sha256", file_sha256(path)}};
    }
    char stamp[32];
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return {{"schema", "manifest/1"},
            {"command", command},
            {"version", artifact_version()},
            {"timestamp", stamp},
            {"config", config.effective},
            {"inputs", in},
            {"bundle_hash", inputs.bundle.hash},
            {"bundle_frozen", inputs.bundle.frozen && verify(inputs.bundle)},
            {"generator_hash", sha256_hex(canonical_dump(to_json(inputs.truth)))},
            {"seeds",
             {{"workload", inputs.workload.seed},
              {"outcome", config.outcome_seed},
              {"latency", config.latency_seed},
              {"replicates", config.replicates}}},
            {"outputs", out}};
}

}  // namespace inar
