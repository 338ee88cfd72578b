// inar: command-line entry point.
//
// Exit status: 0 success, 1 validation error (including bad flags), 2 I/O error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "inar/bench.hpp"
#include "inar/config.hpp"
#include "inar/document.hpp"
#include "inar/error.hpp"
#include "inar/pipeline.hpp"

namespace fs = std::filesystem;
using namespace inar;

namespace {

struct Shared {
    std::vector<std::string> config_files;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    bool allow_unfrozen = false;
    CLI::Option* allow_unfrozen_opt = nullptr;
};

void add_shared_options(CLI::App* cmd, Shared& s) {
    cmd->add_option("--config", s.config_files, "Config file(s), YAML or JSON (config/1); later files win");
    struct Flag {
        const char* key;
        const char* help;
    };
    static const Flag flags[] = {
        {"pool", "Model pool document"},
        {"bundle", "Calibrated bundle"},
        {"truth", "Hidden outcome generator config"},
        {"cost", "Tier cost model"},
        {"workload", "Workload mixture spec"},
        {"out_dir", "Directory for reports and manifests"},
        {"bandwidth", "Uplink bandwidth in Mbps"},
        {"guard_mbps", "Bandwidth guard threshold in Mbps"},
        {"kappa", "Gap penalty weight"},
        {"res_coeff", "Resolution coefficient"},
        {"delta_min", "Minimum predicted gain to offload"},
        {"tau_edge", "Edge operating point"},
        {"replicates", "Seed replicates per report row"},
        {"outcome_seed", "Seed for simulated outcomes"},
        {"latency_seed", "Seed for simulated latency and energy"},
        {"workload_seed", "Override the workload seed"},
        {"n_requests", "Override the workload size"},
    };
    for (const auto& f : flags) {
        std::string name = std::string("--") + f.key;
        std::replace(name.begin(), name.end(), '_', '-');
        s.options[f.key] = cmd->add_option(name, s.values[f.key], f.help);
    }
    s.allow_unfrozen_opt =
        cmd->add_flag("--allow-unfrozen", s.allow_unfrozen, "Run benchmarks against an unfrozen bundle");
}

RunConfig resolve(const Shared& s) {
    Overrides flags;
    for (const auto& [key, opt] : s.options) {
        if (opt->count() > 0) flags[key] = s.values.at(key);
    }
    if (s.allow_unfrozen_opt->count() > 0) flags["allow_unfrozen"] = "true";
    std::vector<fs::path> files(s.config_files.begin(), s.config_files.end());
    return load_config(files, flags);
}

std::vector<StrategyKind> parse_strategy_list(const std::string& list) {
    std::vector<StrategyKind> out;
    if (list == "all") return {std::begin(kAllStrategies), std::end(kAllStrategies)};
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(parse_strategy(item));
    }
    if (out.empty()) throw Error(ErrorCode::ParseError, "empty strategy list");
    return out;
}

std::vector<double> parse_number_list(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorCode::ParseError, "not a number: '" + item + "'");
        }
    }
    return out;
}

std::map<std::string, fs::path> input_files(const RunConfig& cfg, bool with_bundle) {
    std::map<std::string, fs::path> in = {
        {"pool", cfg.pool}, {"truth", cfg.truth}, {"cost", cfg.cost}, {"workload", cfg.workload}};
    if (with_bundle) in["bundle"] = cfg.bundle;
    return in;
}

void write_csv(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    std::ostringstream os;
    body(os);
    write_text_file(path, os.str());
}

std::string utc_now() {
    char stamp[32];
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return stamp;
}

void write_manifest(const std::string& command, const RunConfig& cfg, const Inputs& in, bool with_bundle,
                    std::map<std::string, fs::path> extra_inputs, const std::map<std::string, fs::path>& outputs) {
    auto files = input_files(cfg, with_bundle);
    files.merge(extra_inputs);
    const auto path = cfg.out_dir / (command + "_manifest.json");
    write_text_file(path, make_manifest(command, cfg, in, files, outputs).dump(2) + "\n");
    std::cerr << "manifest: " << path.string() << "\n";
}

RequestDescriptor descriptor_from_args(const std::string& image, const std::string& question,
                                       const std::string& descriptor_file, const CalibratedBundle& bundle,
                                       double* overhead_ms) {
    if (!descriptor_file.empty()) {
        const json doc = load_document(descriptor_file);
        require_schema(doc, "descriptor/1", descriptor_file);
        return doc.get<RequestDescriptor>();
    }
    if (image.empty()) throw Error(ErrorCode::ParseError, "need <image> <question> or --descriptor");
    const auto bytes = read_binary_file(image);
    Extraction e = extract(bytes, question, feature_config(bundle));
    if (overhead_ms) *overhead_ms = e.overhead_ms;
    return e.descriptor;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge-cloud VLM request router: features, routing, calibration and benchmarks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", artifact_version());

    // One option set per subcommand; nodes of a std::map stay put, so the
    // bound storage remains valid.
    std::map<const CLI::App*, Shared> shared;

    // extract
    auto* extract_cmd = app.add_subcommand("extract", "Print the request descriptor for an image and question");
    std::string ex_image, ex_question;
    bool ex_timing = false;
    extract_cmd->add_option("image", ex_image, "PNG or JPEG file")->required();
    extract_cmd->add_option("question", ex_question, "Question text")->required();
    extract_cmd->add_flag("--timing", ex_timing, "Report extraction time on stderr");
    add_shared_options(extract_cmd, shared[extract_cmd]);

    // route
    auto* route_cmd = app.add_subcommand("route", "Print the routing decision for one request");
    std::string rt_image, rt_question, rt_descriptor, rt_strategy = "inar";
    route_cmd->add_option("image", rt_image, "PNG or JPEG file");
    route_cmd->add_option("question", rt_question, "Question text");
    route_cmd->add_option("--descriptor", rt_descriptor, "Descriptor JSON instead of raw inputs");
    route_cmd->add_option("--strategy", rt_strategy, "edge|cloud|inar|text|image|static");
    add_shared_options(route_cmd, shared[route_cmd]);

    // calibrate
    auto* cal_cmd = app.add_subcommand("calibrate", "Fit and freeze a bundle");
    std::string cal_records, cal_output, cal_records_out;
    bool cal_synthesize = false;
    std::size_t cal_n = 1000;
    double cal_target = 0.36;
    cal_cmd->add_option("--records", cal_records, "calrec/1 JSON Lines");
    cal_cmd->add_flag("--synthesize", cal_synthesize, "Draw records from the hidden generator");
    cal_cmd->add_option("--n-records", cal_n, "Synthesized record count");
    cal_cmd->add_option("--target-edge", cal_target, "Target edge fraction on the reference workload");
    cal_cmd->add_option("--output", cal_output, "Bundle path (default <out-dir>/bundle.json)");
    cal_cmd->add_option("--records-out", cal_records_out, "Also write the synthesized records");
    add_shared_options(cal_cmd, shared[cal_cmd]);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Compare strategies on the simulated workload");
    std::string sim_strategies = "all", sim_export, sim_records_out;
    sim_cmd->add_option("--strategies", sim_strategies, "Comma list or 'all'");
    sim_cmd->add_option("--export-trace", sim_export, "Write a replay/1 trace of the run");
    sim_cmd->add_option("--records-out", sim_records_out, "Write exec/1 records of the first replicate");
    add_shared_options(sim_cmd, shared[sim_cmd]);

    // replay
    auto* rep_cmd = app.add_subcommand("replay", "Compare strategies on a recorded replay/1 trace");
    std::string rep_trace, rep_strategies = "all";
    rep_cmd->add_option("trace", rep_trace, "replay/1 JSON Lines")->required();
    rep_cmd->add_option("--strategies", rep_strategies, "Comma list or 'all'");
    add_shared_options(rep_cmd, shared[rep_cmd]);

    // sweep
    auto* sw_cmd = app.add_subcommand("sweep", "Bandwidth sweep for one strategy");
    std::string sw_bandwidths = "10,15,20,50,100,300,1000", sw_strategy = "inar";
    sw_cmd->add_option("--bandwidths", sw_bandwidths, "Ascending comma list in Mbps");
    sw_cmd->add_option("--strategy", sw_strategy, "Strategy to sweep");
    add_shared_options(sw_cmd, shared[sw_cmd]);

    // energy
    auto* en_cmd = app.add_subcommand("energy", "Integrate a power trace (CSV: t_ms,watts)");
    std::string en_trace;
    double en_idle = 0.0;
    en_cmd->add_option("trace", en_trace, "CSV power trace")->required();
    en_cmd->add_option("--idle", en_idle, "Idle power in watts")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n";
        const CLI::App* failed = &app;
        for (const auto* sub : app.get_subcommands()) failed = sub;
        std::cerr << failed->help();
        return 1;
    }

    try {
        if (*en_cmd) {
            PowerTrace trace;
            trace.idle_w = en_idle;
            std::istringstream in(read_text_file(en_trace));
            std::string line;
            while (std::getline(in, line)) {
                if (line.empty() || line.find_first_not_of("0123456789.-+eE, \t\r") != std::string::npos) continue;
                const auto comma = line.find(',');
                if (comma == std::string::npos) throw Error(ErrorCode::BadTrace, "expected t_ms,watts: " + line);
                trace.samples.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
            }
            std::cout << json{{"energy_j", integrate_energy(trace)}, {"samples", trace.samples.size()}}.dump() << "\n";
            return 0;
        }

        const CLI::App* active = app.get_subcommands().front();
        const RunConfig cfg = resolve(shared.at(active));

        if (*extract_cmd) {
            const CalibratedBundle bundle = load_bundle_file(cfg.bundle);
            double overhead = 0.0;
            const RequestDescriptor d = descriptor_from_args(ex_image, ex_question, "", bundle, &overhead);
            std::cout << json(d).dump(2) << "\n";
            if (ex_timing) std::cerr << "extract_ms: " << overhead << "\n";
            return 0;
        }

        if (*route_cmd) {
            const Inputs in = load_inputs(cfg);
            const RequestDescriptor d = descriptor_from_args(rt_image, rt_question, rt_descriptor, in.bundle, nullptr);
            Strategy strategy;
            strategy.kind = parse_strategy(rt_strategy);
            const NetworkState network{cfg.bandwidth_mbps, cfg.guard_mbps};
            const RoutingDecision decision =
                select(strategy, d, apply_bundle(in.pool, in.bundle), network, in.bundle.router);
            std::cout << to_json(decision).dump(2) << "\n";
            return 0;
        }

        if (*cal_cmd) {
            if (cal_synthesize == !cal_records.empty()) {
                throw Error(ErrorCode::ParseError, "calibrate needs exactly one of --records or --synthesize");
            }
            Inputs in = load_inputs(cfg, false);
            const auto reference = generate_workload(in.workload);
            std::vector<CalibrationRecord> records;
            std::map<std::string, fs::path> extra;
            if (cal_synthesize) {
                records = synthesize_reference_records(in, cal_n, cfg.outcome_seed);
                if (!cal_records_out.empty()) write_calibration_records(cal_records_out, records);
            } else {
                records = read_calibration_records(cal_records, in.pool);
                extra["records"] = cal_records;
            }
            CalibrationSettings settings;
            settings.target_edge_fraction = cal_target;
            settings.network = {cfg.bandwidth_mbps, cfg.guard_mbps};
            CalibrationRun run = calibrate(records, reference, in.pool, settings, cfg.outcome_seed);
            run.bundle.provenance.timestamp = utc_now();
            freeze(run.bundle);
            const fs::path out = cal_output.empty() ? cfg.out_dir / "bundle.json" : fs::path(cal_output);
            write_text_file(out, to_json(run.bundle).dump(2) + "\n");
            std::cerr << "records: " << records.size() << "  loss: " << run.report.loss
                      << "  detail_res_scale: " << run.bundle.router.quality.detail_res_scale
                      << "  tau_edge: " << run.bundle.router.rule.tau_edge
                      << "  edge fraction: " << run.edge_fraction << "\n";
            std::cout << out.string() << "\n";
            in.bundle = run.bundle;
            write_manifest("calibrate", cfg, in, false, extra, {{"bundle", out}});
            return 0;
        }

        if (*sim_cmd) {
            const Inputs in = load_inputs(cfg);
            const BenchConfig bench = make_bench_config(in, cfg);
            const auto strategies = parse_strategy_list(sim_strategies);
            const auto requests = generate_workload(in.workload);
            const RunReport report = run_comparison(requests, strategies, bench);

            std::map<std::string, fs::path> outputs = {{"report", cfg.out_dir / "report.csv"},
                                                       {"quintiles", cfg.out_dir / "quintiles.csv"},
                                                       {"report_json", cfg.out_dir / "report.json"}};
            write_csv(outputs["report"], [&](std::ostream& os) { write_strategy_csv(os, report.strategies); });
            write_csv(outputs["quintiles"], [&](std::ostream& os) { write_quintile_csv(os, report.quintiles); });
            write_text_file(outputs["report_json"], to_json(report).dump(2) + "\n");
            if (!sim_records_out.empty()) {
                std::string lines;
                for (StrategyKind kind : strategies) {
                    for (const auto& r : simulate(requests, make_context(bench, kind), bench.truth, bench.cost,
                                                  bench.seeds)) {
                        lines += to_json(r).dump() + "\n";
                    }
                }
                write_text_file(sim_records_out, lines);
                outputs["records"] = sim_records_out;
            }
            if (!sim_export.empty()) {
                const SimulatedSource source(bench.truth, bench.cost, bench.network, bench.seeds);
                write_trace(sim_export, export_trace(requests, bench.pool, source));
                outputs["trace"] = sim_export;
            }
            write_strategy_csv(std::cout, report.strategies);
            write_manifest("simulate", cfg, in, true, {}, outputs);
            return 0;
        }

        if (*rep_cmd) {
            const Inputs in = load_inputs(cfg);
            const BenchConfig bench = make_bench_config(in, cfg);
            const ReplayTrace trace = ingest_trace(rep_trace, in.pool);
            std::size_t measured = 0;
            for (const auto& r : trace.records) measured += r.measured.empty() ? 0 : 1;
            std::cerr << "ingested " << trace.records.size() << " records (" << measured << " with measurements)\n";
            const RunReport report = run_comparison(trace, parse_strategy_list(rep_strategies), bench);
            const std::map<std::string, fs::path> outputs = {{"report", cfg.out_dir / "replay_report.csv"},
                                                             {"quintiles", cfg.out_dir / "replay_quintiles.csv"}};
            write_csv(outputs.at("report"), [&](std::ostream& os) { write_strategy_csv(os, report.strategies); });
            write_csv(outputs.at("quintiles"), [&](std::ostream& os) { write_quintile_csv(os, report.quintiles); });
            write_strategy_csv(std::cout, report.strategies);
            write_manifest("replay", cfg, in, true, {{"trace", rep_trace}}, outputs);
            return 0;
        }

        if (*sw_cmd) {
            const Inputs in = load_inputs(cfg);
            const BenchConfig bench = make_bench_config(in, cfg);
            const auto requests = generate_workload(in.workload);
            const auto bandwidths = parse_number_list(sw_bandwidths);
            const auto points = run_bandwidth_sweep(requests, parse_strategy(sw_strategy), bandwidths, bench);
            const std::map<std::string, fs::path> outputs = {{"sweep", cfg.out_dir / "sweep.csv"}};
            write_csv(outputs.at("sweep"), [&](std::ostream& os) { write_sweep_csv(os, points); });
            write_sweep_csv(std::cout, points);
            write_manifest("sweep", cfg, in, true, {}, outputs);
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "inar: " << e.what() << "\n";
        return e.is_io() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "inar: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
