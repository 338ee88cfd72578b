// Regenerates the pinned reference documents in the config directory:
// truth bases, the frozen bundle and the anchored tier overheads. The bundle
// comes out of the same path as `inar calibrate --synthesize`.

#include <iostream>

#include "inar/document.hpp"
#include "inar/pipeline.hpp"

using namespace inar;

int main(int argc, char** argv) {
    try {
        std::vector<std::filesystem::path> files;
        if (argc > 1) files.emplace_back(argv[1]);
        const RunConfig cfg = load_config(files, {});

        Inputs in = load_inputs(cfg, false);
        const auto reference = generate_workload(in.workload);
        solve_truth_bases(in.truth, reference, in.pool, cfg.outcome_seed);
        write_text_file(cfg.truth, to_json(in.truth).dump(2) + "\n");
        for (const auto& [id, base] : in.truth.base) std::cout << "base " << id << " " << base << "\n";

        const auto records = synthesize_reference_records(in, 1000, cfg.outcome_seed);
        CalibrationSettings settings;
        settings.network = {cfg.bandwidth_mbps, cfg.guard_mbps};
        CalibrationRun run = calibrate(records, reference, in.pool, settings, cfg.outcome_seed);
        write_text_file(cfg.bundle, to_json(run.bundle).dump(2) + "\n");
        std::cout << "edge fraction " << run.edge_fraction << " tau " << run.bundle.router.rule.tau_edge << "\n";

        in.bundle = run.bundle;
        const BenchConfig bench = make_bench_config(in, cfg);
        const TierCostModel cost = anchor_overheads(reference, bench, 824.0, 2408.0);
        write_text_file(cfg.cost, to_json(cost).dump(2) + "\n");
        std::cout << "overheads " << cost.edge_overhead_ms << " " << cost.cloud_overhead_ms << "\n";
    } catch (const std::exception& e) {
        std::cerr << "pin_reference: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
