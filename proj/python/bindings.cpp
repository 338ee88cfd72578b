#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "inar/bench.hpp"
#include "inar/config.hpp"
#include "inar/document.hpp"
#include "inar/error.hpp"
#include "inar/features.hpp"
#include "inar/pipeline.hpp"
#include "inar/router.hpp"
#include "inar/strategies.hpp"

namespace py = pybind11;
using namespace inar;

namespace {

// Everything crosses the boundary as JSON text; the Python side parses it.

RunConfig config_for(const std::vector<std::string>& files, const Overrides& overrides) {
    std::vector<std::filesystem::path> paths(files.begin(), files.end());
    return load_config(paths, overrides);
}

std::string extract_json(const std::string& image_path, const std::string& question, const std::string& bundle) {
    const RunConfig cfg = config_for({}, {});
    const CalibratedBundle b = load_bundle_file(bundle.empty() ? cfg.bundle : std::filesystem::path(bundle));
    const Extraction e = extract(read_binary_file(image_path), question, feature_config(b));
    nlohmann::json j = e.descriptor;
    j["overhead_ms"] = e.overhead_ms;
    return j.dump();
}

std::string route_json(const std::string& descriptor, const std::string& strategy, const std::vector<std::string>& files,
                       const Overrides& overrides) {
    const RunConfig cfg = config_for(files, overrides);
    const Inputs in = load_inputs(cfg);
    const nlohmann::json doc = nlohmann::json::parse(descriptor);
    require_schema(doc, "descriptor/1", "descriptor");
    Strategy s;
    s.kind = parse_strategy(strategy);
    const RoutingDecision d = select(s, doc.get<RequestDescriptor>(), apply_bundle(in.pool, in.bundle),
                                     {cfg.bandwidth_mbps, cfg.guard_mbps}, in.bundle.router);
    return to_json(d).dump();
}

std::string simulate_json(const std::vector<std::string>& strategies, const std::vector<std::string>& files,
                          const Overrides& overrides) {
    const RunConfig cfg = config_for(files, overrides);
    const Inputs in = load_inputs(cfg);
    const BenchConfig bench = make_bench_config(in, cfg);
    std::vector<StrategyKind> kinds;
    for (const auto& s : strategies) kinds.push_back(parse_strategy(s));
    if (kinds.empty()) kinds.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
    return to_json(run_comparison(generate_workload(in.workload), kinds, bench)).dump();
}

std::string sweep_json(const std::string& strategy, const std::vector<double>& bandwidths,
                       const std::vector<std::string>& files, const Overrides& overrides) {
    const RunConfig cfg = config_for(files, overrides);
    const Inputs in = load_inputs(cfg);
    const BenchConfig bench = make_bench_config(in, cfg);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : run_bandwidth_sweep(generate_workload(in.workload), parse_strategy(strategy), bandwidths, bench)) {
        rows.push_back({{"bandwidth_mbps", p.bandwidth_mbps},
                        {"transfer_ms", p.transfer_ms},
                        {"lat_ms", p.latency_ms},
                        {"edge_frac", p.edge_fraction},
                        {"acc", p.accuracy},
                        {"n", p.n}});
    }
    return rows.dump();
}

double energy(const std::vector<std::pair<double, double>>& samples, double idle_w) {
    PowerTrace t;
    t.idle_w = idle_w;
    for (const auto& [ms, w] : samples) t.samples.push_back({ms, w});
    return integrate_energy(t);
}

}  // namespace

PYBIND11_MODULE(_inar, m) {
    m.doc() = "Edge-cloud VLM request router";

    py::register_exception<Error>(m, "InarError", PyExc_RuntimeError);

    m.def("version", &artifact_version);
    m.def("extract_json", &extract_json, py::arg("image_path"), py::arg("question"), py::arg("bundle") = "");
    m.def("route_json", &route_json, py::arg("descriptor"), py::arg("strategy") = "inar",
          py::arg("config_files") = std::vector<std::string>{}, py::arg("overrides") = Overrides{});
    m.def("simulate_json", &simulate_json, py::arg("strategies") = std::vector<std::string>{},
          py::arg("config_files") = std::vector<std::string>{}, py::arg("overrides") = Overrides{});
    m.def("sweep_json", &sweep_json, py::arg("strategy"), py::arg("bandwidths"),
          py::arg("config_files") = std::vector<std::string>{}, py::arg("overrides") = Overrides{});
    m.def("integrate_energy", &energy, py::arg("samples"), py::arg("idle_w"));
    m.def("transfer_latency_ms", &transfer_latency_ms, py::arg("payload_bytes"), py::arg("bandwidth_mbps"));
}
