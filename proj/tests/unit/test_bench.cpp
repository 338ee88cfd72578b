#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

#include "inar/bench.hpp"
#include "inar/document.hpp"
#include "inar/error.hpp"
#include "inar/pipeline.hpp"
#include "oracles.hpp"

using namespace inar;

namespace {

struct Reference {
    Inputs inputs;
    BenchConfig bench;
    std::vector<Request> requests;

    explicit Reference(std::size_t n) {
        const RunConfig cfg = load_config({}, {}, [](const char*) -> const char* { return nullptr; });
        inputs = load_inputs(cfg);
        inputs.workload.n_requests = n;
        requests = generate_workload(inputs.workload);
        bench = make_bench_config(inputs, cfg);
    }
};

std::string csv(const RunReport& r) {
    std::ostringstream os;
    write_strategy_csv(os, r.strategies);
    write_quintile_csv(os, r.quintiles);
    return os.str();
}

std::string line_for(const std::string& id, const std::string& scores) {
    return R"({"schema":"replay/1","id":)" + id +
           R"(,"image":{"s_blur":0.9,"s_exp":0.8,"s_art":1.0,"s_detail":0.3},)"
           R"("text_axes":{"length":0.2,"entity_density":0.0,"question_type":0.3,"vocabulary":0.1,"reasoning":0.0,"context":0.5},)"
           R"("scores":)" + scores + "}";
}

const std::string kAllScores = R"({"qwen3-vl-2b":1,"smolvlm-2b":0,"llava-ov-8b":0.6666666666666666,"qwen3-vl-8b":1})";

}  // namespace

TEST_CASE("replay traces parse and validate") {
    const PoolConfig pool = reference_pool();
    const std::string three = line_for("1", kAllScores) + "\n" + line_for("2", kAllScores) + "\n\n" +
                              line_for("3", kAllScores) + "\n";
    CHECK(parse_trace(three, "mem", pool).records.size() == 3);

    const std::string partial = line_for("1", kAllScores) + "\n" +
                                line_for("7", R"({"qwen3-vl-2b":1,"smolvlm-2b":0,"llava-ov-8b":1})") + "\n";
    try {
        parse_trace(partial, "trace.jsonl", pool);
        FAIL("expected PartialCoverage");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PartialCoverage);
        const std::string msg = e.what();
        CHECK(msg.find("7") != std::string::npos);
        CHECK(msg.find("qwen3-vl-8b") != std::string::npos);
    }

    auto expect_schema_error = [&](const std::string& text) {
        try {
            parse_trace(text, "t.jsonl", pool);
            FAIL("expected SchemaMismatch");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SchemaMismatch);
            CHECK(std::string(e.what()).find("t.jsonl:") != std::string::npos);
        }
    };
    std::string wrong = line_for("1", kAllScores);
    wrong.replace(wrong.find("replay/1"), 8, "replay/2");
    expect_schema_error(wrong);
    expect_schema_error("{not json");
    expect_schema_error(line_for("1", R"({"qwen3-vl-2b":1.5,"smolvlm-2b":0,"llava-ov-8b":1,"qwen3-vl-8b":1})"));
}

TEST_CASE("trace files round-trip") {
    const Reference ref(50);
    const SimulatedSource source(ref.bench.truth, ref.bench.cost, ref.bench.network, ref.bench.seeds);
    const ReplayTrace trace = export_trace(ref.requests, apply_bundle(ref.bench.pool, ref.bench.bundle), source);
    const auto path = std::filesystem::temp_directory_path() / "inar_replay_test.jsonl";
    write_trace(path, trace);
    const ReplayTrace back = ingest_trace(path, ref.bench.pool);
    CHECK(dump_trace(back) == dump_trace(trace));
    std::filesystem::remove(path);
    CHECK_THROWS_AS(ingest_trace(path, ref.bench.pool), Error);
}

TEST_CASE("replayed simulation reproduces the simulated aggregates") {
    Reference ref(600);
    ref.bench.replicates = 1;
    const RunReport simulated = run_comparison(ref.requests, kAllStrategies, ref.bench);
    const SimulatedSource source(ref.bench.truth, ref.bench.cost, ref.bench.network, ref.bench.seeds);
    const ReplayTrace trace = export_trace(ref.requests, apply_bundle(ref.bench.pool, ref.bench.bundle), source);
    const ReplayTrace reread = parse_trace(dump_trace(trace), "mem", ref.bench.pool);
    const RunReport replayed = run_comparison(reread, kAllStrategies, ref.bench);
    CHECK(csv(replayed) == csv(simulated));
    CHECK(to_json(replayed).dump() == to_json(simulated).dump());
}

TEST_CASE("reports are deterministic and rows add up") {
    const Reference ref(300);
    const RunReport a = run_comparison(ref.requests, kAllStrategies, ref.bench);
    const RunReport b = run_comparison(ref.requests, kAllStrategies, ref.bench);
    CHECK(csv(a) == csv(b));
    for (const auto& row : a.strategies) {
        CHECK(row.edge_count + row.cloud_count == row.n);
        CHECK(row.n == 300u * 5u);
        CHECK(row.replicates == 5);
        CHECK(row.latency_sd >= 0.0);
        CHECK(row.energy_sd >= 0.0);
        CHECK(row.accuracy_sd >= 0.0);
        CHECK((row.edge_fraction() >= 0.0 && row.edge_fraction() <= 1.0));
        CHECK((row.accuracy >= 0.0 && row.accuracy <= 1.0));
    }
    CHECK(a.row(StrategyKind::EdgeOnly).edge_fraction() == 1.0);
    CHECK(a.row(StrategyKind::CloudOnly).edge_fraction() == 0.0);
    for (const auto& row : a.strategies) CHECK(a.row(StrategyKind::Oracle).accuracy >= row.accuracy);
}

TEST_CASE("replicate combination") {
    StrategySummary x, y, z;
    x.n = y.n = z.n = 10;
    x.edge_count = 4;
    y.edge_count = 5;
    z.edge_count = 6;
    x.latency_ms = 1.0;
    y.latency_ms = 2.0;
    z.latency_ms = 3.0;
    const StrategySummary reps[] = {x, y, z};
    const StrategySummary c = combine_replicates(reps);
    CHECK(c.latency_ms == doctest::Approx(2.0));
    CHECK(c.latency_sd == doctest::Approx(1.0));
    CHECK(c.n == 30);
    CHECK(c.edge_count == 15);
    CHECK(c.replicates == 3);
    CHECK(combine_replicates(std::span<const StrategySummary>(reps, 1)).latency_sd == 0.0);
    CHECK_THROWS_AS(combine_replicates({}), Error);
}

TEST_CASE("quintile analysis") {
    const Reference ref(500);
    const ExecutionContext ctx = make_context(ref.bench, StrategyKind::EdgeOnly);
    const auto recs = simulate(ref.requests, ctx, ref.bench.truth, ref.bench.cost, ref.bench.seeds);
    const auto q = run_quintile_analysis(recs);
    std::size_t total = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(q[i].quintile == static_cast<Quintile>(i + 1));
        CHECK(q[i].present());
        CHECK(q[i].edge_fraction == 1.0);
        total += q[i].n;
    }
    CHECK(total == 500);

    // Absent buckets are reported, not fatal.
    std::vector<ExecutionRecord> only_q3(3);
    for (auto& r : only_q3) r.quintile = Quintile::Q3;
    const auto sparse = run_quintile_analysis(only_q3);
    CHECK_FALSE(sparse[0].present());
    CHECK(sparse[2].n == 3);
    std::ostringstream os;
    write_quintile_csv(os, sparse);
    CHECK(os.str().find("Q1,0,0,,\n") != std::string::npos);
}

TEST_CASE("bandwidth sweep") {
    Reference ref(300);
    ref.bench.replicates = 1;
    ref.bench.cost.noise = false;
    const double bws[] = {5.0, 10.0, 14.99, 15.0, 20.0, 300.0, 1000.0};
    const auto sweep = run_bandwidth_sweep(ref.requests, StrategyKind::InarVl, bws, ref.bench);
    REQUIRE(sweep.size() == 7);
    for (const auto& p : sweep) {
        if (p.bandwidth_mbps < 15.0) CHECK(p.edge_fraction == 1.0);
    }
    CHECK(std::abs(sweep[3].transfer_ms - 133.3) <= 0.5);
    CHECK(std::abs(sweep[5].transfer_ms - 6.7) <= 0.5);
    CHECK(sweep[6].latency_ms < sweep[4].latency_ms);

    // Cloud-only isolates the transfer term.
    const auto cloud = run_bandwidth_sweep(ref.requests, StrategyKind::CloudOnly, std::span(bws).subspan(3), ref.bench);
    for (std::size_t i = 1; i < cloud.size(); ++i) CHECK(cloud[i].latency_ms < cloud[i - 1].latency_ms);
    CHECK(cloud[0].latency_ms - cloud[2].latency_ms ==
          doctest::Approx(transfer_latency_ms(250'000, 15.0) - transfer_latency_ms(250'000, 300.0)));

    const double descending[] = {100.0, 10.0};
    CHECK_THROWS_AS(run_bandwidth_sweep(ref.requests, StrategyKind::InarVl, descending, ref.bench), Error);
}

TEST_CASE("unfrozen bundles are refused unless allowed") {
    Reference ref(20);
    ref.bench.bundle.router.rule.tau_edge += 0.01;
    try {
        run_comparison(ref.requests, kAllStrategies, ref.bench);
        FAIL("expected UnfrozenBundle");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnfrozenBundle);
    }
    ref.bench.allow_unfrozen = true;
    CHECK_NOTHROW(run_comparison(ref.requests, kAllStrategies, ref.bench));
}

TEST_CASE("csv headers") {
    std::ostringstream a, b, c;
    write_strategy_csv(a, {});
    write_quintile_csv(b, {});
    write_sweep_csv(c, {});
    CHECK(a.str() == "strategy,lat_ms,lat_sd,energy_j,energy_sd,acc,acc_sd,edge_pct,n,edge_count,cloud_count,replicates\n");
    CHECK(b.str().rfind("quintile,n,edge_count,edge_pct,acc\n", 0) == 0);
    CHECK(c.str() == "bandwidth_mbps,transfer_ms,lat_ms,edge_pct,acc,n\n");
}

TEST_CASE("anchored overheads hit the tier targets") {
    const Reference ref(400);
    BenchConfig cfg = ref.bench;
    cfg.cost = anchor_overheads(ref.requests, ref.bench, 824.0, 2408.0);
    const StrategyKind tiers[] = {StrategyKind::EdgeOnly, StrategyKind::CloudOnly};
    const RunReport r = run_comparison(ref.requests, tiers, cfg);
    CHECK(r.row(StrategyKind::EdgeOnly).latency_ms == doctest::Approx(824.0).epsilon(1e-9));
    CHECK(r.row(StrategyKind::CloudOnly).latency_ms == doctest::Approx(2408.0).epsilon(1e-9));
}
