#include "inar/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "inar/document.hpp"
#include "inar/error.hpp"

namespace inar {

namespace {

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

double sample_sd(std::span<const double> values) {
    if (values.size() < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double mean_of(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) total += v;
    return values.empty() ? 0.0 : total / static_cast<double>(values.size());
}

std::array<QuintileSummary, 5> quintiles_for(const std::vector<std::vector<ExecutionRecord>>& runs,
                                             std::span<const StrategyKind> strategies) {
    if (runs.empty()) return {};
    std::size_t pick = 0;
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        if (strategies[i] == StrategyKind::InarVl) {
            pick = i;
            break;
        }
    }
    return run_quintile_analysis(runs[pick]);
}

}  // namespace

// ---------------------------------------------------------------------------
// Replay

std::vector<Request> ReplayTrace::requests() const {
    std::vector<Request> out;
    out.reserve(records.size());
    for (const auto& r : records) {
        Request req;
        req.id = r.id;
        req.image = r.image;
        req.text_axes = r.text_axes;
        out.push_back(std::move(req));
    }
    return out;
}

nlohmann::json to_json(const ReplayRecord& r) {
    nlohmann::json measured = nlohmann::json::object();
    for (const auto& [id, m] : r.measured) measured[id] = {{"latency_ms", m.latency_ms}, {"energy_j", m.energy_j}};
    nlohmann::json j = {{"schema", "replay/1"},
                        {"id", r.id},
                        {"image", r.image},
                        {"text_axes", text_axes_to_json(r.text_axes)},
                        {"scores", r.scores}};
    if (!r.measured.empty()) j["measured"] = measured;
    return j;
}

ReplayRecord replay_record_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("schema", "") != "replay/1") {
        throw Error(ErrorCode::SchemaMismatch, "expected schema \"replay/1\"");
    }
    ReplayRecord r;
    try {
        r.id = j.at("id").get<std::uint64_t>();
        r.image = j.at("image").get<ImageQuality>();
        r.text_axes = text_axes_from_json(j.at("text_axes"));
        r.scores = j.at("scores").get<std::map<std::string, double>>();
        if (j.contains("measured")) {
            for (const auto& [id, m] : j["measured"].items()) {
                r.measured[id] = {m.at("latency_ms").get<double>(), m.at("energy_j").get<double>()};
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, e.what());
    }
    for (const auto& [id, s] : r.scores) {
        if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::SchemaMismatch, "score for '" + id + "' outside [0,1]");
    }
    for (const auto& [id, m] : r.measured) {
        if (!(m.latency_ms > 0.0) || !(m.energy_j >= 0.0)) {
            throw Error(ErrorCode::SchemaMismatch, "measurement for '" + id + "' out of range");
        }
    }
    return r;
}

ReplayTrace parse_trace(std::string_view text, std::string_view origin, const PoolConfig& pool) {
    ReplayTrace trace;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        const std::string where = std::string(origin) + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaMismatch, where + ": " + e.what());
        }
        ReplayRecord r;
        try {
            r = replay_record_from_json(j);
        } catch (const Error& e) {
            throw Error(e.code(), where + ": " + e.what());
        }
        for (const auto& m : pool.profiles) {
            if (!r.scores.count(m.id)) {
                throw Error(ErrorCode::PartialCoverage,
                            where + ": record " + std::to_string(r.id) + " has no outcome for '" + m.id + "'");
            }
        }
        trace.records.push_back(std::move(r));
    }
    return trace;
}

ReplayTrace ingest_trace(const std::filesystem::path& path, const PoolConfig& pool) {
    return parse_trace(read_text_file(path), path.string(), pool);
}

std::string dump_trace(const ReplayTrace& trace) {
    std::string out;
    for (const auto& r : trace.records) {
        out += to_json(r).dump();
        out += '\n';
    }
    return out;
}

void write_trace(const std::filesystem::path& path, const ReplayTrace& trace) {
    write_text_file(path, dump_trace(trace));
}

ReplayTrace export_trace(std::span<const Request> requests, const PoolConfig& pool, const OutcomeSource& source) {
    ReplayTrace trace;
    trace.records.reserve(requests.size());
    for (const auto& req : requests) {
        ReplayRecord r;
        r.id = req.id;
        r.image = req.image;
        r.text_axes = req.text_axes;
        for (const auto& m : pool.profiles) {
            r.scores[m.id] = source.score(req, m, m.calibration_resolution);
            r.measured[m.id] = {source.latency_ms(req, m, m.tier), source.energy_j(req, m, m.tier)};
        }
        trace.records.push_back(std::move(r));
    }
    return trace;
}

ReplaySource::ReplaySource(const ReplayTrace& trace, TierCostModel fallback, NetworkState network,
                           std::uint64_t latency_seed)
    : fallback_(fallback), network_(network), latency_seed_(latency_seed) {
    for (const auto& r : trace.records) {
        if (!index_.emplace(r.id, &r).second) {
            throw Error(ErrorCode::DuplicateId, "replay trace repeats id " + std::to_string(r.id));
        }
    }
}

const ReplayRecord& ReplaySource::record(const Request& request) const {
    const auto it = index_.find(request.id);
    if (it == index_.end()) throw Error(ErrorCode::MissingOutcome, "no replay record " + std::to_string(request.id));
    return *it->second;
}

double ReplaySource::score(const Request& request, const ModelProfile& model, int) const {
    const ReplayRecord& r = record(request);
    const auto it = r.scores.find(model.id);
    if (it == r.scores.end()) {
        throw Error(ErrorCode::MissingOutcome, "record " + std::to_string(r.id) + " has no score for '" + model.id + "'");
    }
    return it->second;
}

double ReplaySource::latency_ms(const Request& request, const ModelProfile& model, Tier placement) const {
    const ReplayRecord& r = record(request);
    const auto it = r.measured.find(model.id);
    if (it != r.measured.end() && placement == model.tier) return it->second.latency_ms;
    return simulate_latency(request, model, placement, fallback_, network_, latency_seed_);
}

double ReplaySource::energy_j(const Request& request, const ModelProfile& model, Tier placement) const {
    const ReplayRecord& r = record(request);
    const auto it = r.measured.find(model.id);
    if (it != r.measured.end() && placement == model.tier) return it->second.energy_j;
    return simulate_energy(request, model, placement, fallback_, latency_seed_);
}

// ---------------------------------------------------------------------------
// Summaries

StrategySummary summarize(StrategyKind kind, std::span<const ExecutionRecord> records) {
    StrategySummary s;
    s.kind = kind;
    s.n = records.size();
    for (const auto& r : records) {
        (r.placement == Tier::Edge ? s.edge_count : s.cloud_count) += 1;
        s.latency_ms += r.latency_ms;
        s.energy_j += r.energy_j;
        s.accuracy += r.score;
    }
    if (s.n > 0) {
        s.latency_ms /= static_cast<double>(s.n);
        s.energy_j /= static_cast<double>(s.n);
        s.accuracy /= static_cast<double>(s.n);
    }
    return s;
}

StrategySummary combine_replicates(std::span<const StrategySummary> replicates) {
    if (replicates.empty()) throw Error(ErrorCode::NoRecords, "no replicates to combine");
    std::vector<double> lat;
    std::vector<double> energy;
    std::vector<double> acc;
    StrategySummary out;
    out.kind = replicates.front().kind;
    out.replicates = static_cast<int>(replicates.size());
    for (const auto& r : replicates) {
        lat.push_back(r.latency_ms);
        energy.push_back(r.energy_j);
        acc.push_back(r.accuracy);
        out.n += r.n;
        out.edge_count += r.edge_count;
        out.cloud_count += r.cloud_count;
    }
    out.latency_ms = mean_of(lat);
    out.latency_sd = sample_sd(lat);
    out.energy_j = mean_of(energy);
    out.energy_sd = sample_sd(energy);
    out.accuracy = mean_of(acc);
    out.accuracy_sd = sample_sd(acc);
    return out;
}

std::array<QuintileSummary, 5> run_quintile_analysis(std::span<const ExecutionRecord> records) {
    std::array<QuintileSummary, 5> out{};
    for (std::size_t i = 0; i < out.size(); ++i) out[i].quintile = static_cast<Quintile>(i + 1);
    for (const auto& r : records) {
        auto& q = out[static_cast<std::size_t>(r.quintile) - 1];
        ++q.n;
        if (r.placement == Tier::Edge) ++q.edge_count;
        q.accuracy += r.score;
    }
    for (auto& q : out) {
        if (q.n == 0) continue;
        q.edge_fraction = static_cast<double>(q.edge_count) / q.n;
        q.accuracy /= static_cast<double>(q.n);
    }
    return out;
}

const StrategySummary& RunReport::row(StrategyKind kind) const {
    for (const auto& s : strategies) {
        if (s.kind == kind) return s;
    }
    throw Error(ErrorCode::NoRecords, std::string("no report row for ") + to_string(kind));
}

// ---------------------------------------------------------------------------
// Runs

void require_frozen(const BenchConfig& config) {
    if (config.allow_unfrozen) return;
    if (!config.bundle.frozen) throw Error(ErrorCode::UnfrozenBundle, "bundle is not frozen (pass --allow-unfrozen)");
    if (!verify(config.bundle)) throw Error(ErrorCode::UnfrozenBundle, "bundle hash does not match its content");
}

ExecutionContext make_context(const BenchConfig& config, StrategyKind kind) {
    ExecutionContext ctx;
    ctx.pool = config.pool;
    ctx.bundle = config.bundle;
    ctx.network = config.network;
    ctx.boundaries = config.bundle.quintiles;
    ctx.strategy.kind = kind;
    ctx.strategy.static_edge = config.static_edge;
    ctx.strategy.static_cloud = config.static_cloud;
    return ctx;
}

RunReport run_comparison(std::span<const Request> requests, std::span<const StrategyKind> strategies,
                         const BenchConfig& config) {
    require_frozen(config);
    if (config.replicates < 1) throw Error(ErrorCode::BadSpec, "replicates must be at least 1");
    RunReport report;
    std::vector<std::vector<ExecutionRecord>> first_runs;
    for (StrategyKind kind : strategies) {
        const ExecutionContext ctx = make_context(config, kind);
        std::vector<StrategySummary> reps;
        for (int k = 0; k < config.replicates; ++k) {
            auto records = simulate(requests, ctx, config.truth, config.cost, config.seeds.replicate(k));
            reps.push_back(summarize(kind, records));
            if (k == 0) first_runs.push_back(std::move(records));
        }
        report.strategies.push_back(combine_replicates(reps));
    }
    report.quintiles = quintiles_for(first_runs, strategies);
    return report;
}

RunReport run_comparison(const ReplayTrace& trace, std::span<const StrategyKind> strategies,
                         const BenchConfig& config) {
    require_frozen(config);
    const std::vector<Request> requests = trace.requests();
    const ReplaySource source(trace, config.cost, config.network, config.seeds.latency);
    RunReport report;
    std::vector<std::vector<ExecutionRecord>> runs;
    for (StrategyKind kind : strategies) {
        auto records = execute(requests, make_context(config, kind), source);
        const StrategySummary s = summarize(kind, records);
        report.strategies.push_back(combine_replicates(std::span<const StrategySummary>(&s, 1)));
        runs.push_back(std::move(records));
    }
    report.quintiles = quintiles_for(runs, strategies);
    return report;
}

std::vector<SweepPoint> run_bandwidth_sweep(std::span<const Request> requests, StrategyKind strategy,
                                            std::span<const double> bandwidths, const BenchConfig& config) {
    require_frozen(config);
    if (!std::is_sorted(bandwidths.begin(), bandwidths.end())) {
        throw Error(ErrorCode::BadSpec, "sweep bandwidths must be ascending");
    }
    std::vector<SweepPoint> out;
    for (double bw : bandwidths) {
        BenchConfig cfg = config;
        cfg.network.bandwidth_mbps = bw;
        const ExecutionContext ctx = make_context(cfg, strategy);
        std::vector<StrategySummary> reps;
        for (int k = 0; k < std::max(1, cfg.replicates); ++k) {
            const auto records = simulate(requests, ctx, cfg.truth, cfg.cost, cfg.seeds.replicate(k));
            reps.push_back(summarize(strategy, records));
        }
        const StrategySummary s = combine_replicates(reps);
        out.push_back({bw, transfer_latency_ms(cfg.cost.payload_bytes, bw), s.n, s.latency_ms, s.edge_fraction(),
                       s.accuracy});
    }
    return out;
}

TierCostModel anchor_overheads(std::span<const Request> requests, const BenchConfig& config, double edge_target_ms,
                               double cloud_target_ms) {
    BenchConfig cfg = config;
    cfg.allow_unfrozen = true;
    cfg.cost.edge_overhead_ms = 0.0;
    cfg.cost.cloud_overhead_ms = 0.0;
    const StrategyKind tiers[] = {StrategyKind::EdgeOnly, StrategyKind::CloudOnly};
    const RunReport base = run_comparison(requests, tiers, cfg);
    TierCostModel out = config.cost;
    out.edge_overhead_ms = edge_target_ms - base.row(StrategyKind::EdgeOnly).latency_ms;
    out.cloud_overhead_ms = cloud_target_ms - base.row(StrategyKind::CloudOnly).latency_ms;
    return out;
}

// ---------------------------------------------------------------------------
// Output

void write_strategy_csv(std::ostream& os, std::span<const StrategySummary> rows) {
    os << "strategy,lat_ms,lat_sd,energy_j,energy_sd,acc,acc_sd,edge_pct,n,edge_count,cloud_count,replicates\n";
    for (const auto& s : rows) {
        os << display_name(s.kind) << ',' << fmt(s.latency_ms, 2) << ',' << fmt(s.latency_sd, 2) << ','
           << fmt(s.energy_j, 3) << ',' << fmt(s.energy_sd, 3) << ',' << fmt(100.0 * s.accuracy, 2) << ','
           << fmt(100.0 * s.accuracy_sd, 2) << ',' << fmt(100.0 * s.edge_fraction(), 2) << ',' << s.n << ','
           << s.edge_count << ',' << s.cloud_count << ',' << s.replicates << '\n';
    }
}

void write_quintile_csv(std::ostream& os, const std::array<QuintileSummary, 5>& rows) {
    os << "quintile,n,edge_count,edge_pct,acc\n";
    for (const auto& q : rows) {
        os << to_string(q.quintile) << ',' << q.n << ',' << q.edge_count << ',';
        if (q.present()) {
            os << fmt(100.0 * q.edge_fraction, 2) << ',' << fmt(100.0 * q.accuracy, 2);
        } else {
            os << ',';
        }
        os << '\n';
    }
}

void write_sweep_csv(std::ostream& os, std::span<const SweepPoint> rows) {
    os << "bandwidth_mbps,transfer_ms,lat_ms,edge_pct,acc,n\n";
    for (const auto& p : rows) {
        os << fmt(p.bandwidth_mbps, 1) << ',' << fmt(p.transfer_ms, 2) << ',' << fmt(p.latency_ms, 2) << ','
           << fmt(100.0 * p.edge_fraction, 2) << ',' << fmt(100.0 * p.accuracy, 2) << ',' << p.n << '\n';
    }
}

nlohmann::json to_json(const StrategySummary& s) {
    return {{"strategy", display_name(s.kind)},
            {"lat_ms", s.latency_ms},
            {"lat_sd", s.latency_sd},
            {"energy_j", s.energy_j},
            {"energy_sd", s.energy_sd},
            {"acc", s.accuracy},
            {"acc_sd", s.accuracy_sd},
            {"edge_frac", s.edge_fraction()},
            {"n", s.n},
            {"edge_count", s.edge_count},
            {"cloud_count", s.cloud_count},
            {"replicates", s.replicates}};
}

nlohmann::json to_json(const RunReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& s : report.strategies) rows.push_back(to_json(s));
    nlohmann::json quintiles = nlohmann::json::array();
    for (const auto& q : report.quintiles) {
        nlohmann::json j = {{"quintile", to_string(q.quintile)}, {"n", q.n}, {"edge_count", q.edge_count}};
        if (q.present()) {
            j["edge_frac"] = q.edge_fraction;
            j["acc"] = q.accuracy;
        }
        quintiles.push_back(j);
    }
    nlohmann::json sweep = nlohmann::json::array();
    for (const auto& p : report.sweep) {
        sweep.push_back({{"bandwidth_mbps", p.bandwidth_mbps},
                         {"transfer_ms", p.transfer_ms},
                         {"lat_ms", p.latency_ms},
                         {"edge_frac", p.edge_fraction},
                         {"acc", p.accuracy},
                         {"n", p.n}});
    }
    return {{"schema", "report/1"}, {"strategies", rows}, {"quintiles", quintiles}, {"sweep", sweep}};
}

}  // namespace inar
