#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "inar/document.hpp"
#include "inar/error.hpp"
#include "inar/pipeline.hpp"
#include "inar/simulator.hpp"
#include "oracles.hpp"

using namespace inar;

namespace {

WorkloadSpec reference_spec() { return workload_spec_from_json(load_document(oracle::config_file("workload.yaml"))); }

TruthConfig reference_truth() { return truth_from_json(load_document(oracle::config_file("truth.json"))); }

std::string stream_of(std::span<const ExecutionRecord> records) {
    std::string out;
    for (const auto& r : records) out += to_json(r).dump() + "\n";
    return out;
}

}  // namespace

TEST_CASE("workload generation is deterministic") {
    WorkloadSpec spec = reference_spec();
    spec.n_requests = 300;
    const auto a = generate_workload(spec);
    const auto b = generate_workload(spec);
    REQUIRE(a.size() == 300);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(nlohmann::json(a[i].image).dump() == nlohmann::json(b[i].image).dump());
        CHECK(a[i].text_axes == b[i].text_axes);
    }
    spec.seed = 43;
    CHECK(generate_workload(spec)[0].text_axes != a[0].text_axes);
}

TEST_CASE("degenerate mixture puts everything in the lowest bucket") {
    WorkloadSpec spec;
    spec.n_requests = 200;
    for (auto& a : spec.image) a = {1.0, 8.0, 0.0};
    for (auto& a : spec.text) a = {0.0, 8.0, 0.0};
    for (const auto& r : generate_workload(spec)) {
        const RequestDescriptor d = fuse(r.image, combine_text(r.text_axes));
        CHECK(d.complexity == 0.0);
        CHECK(complexity_quintile(d.complexity, kEvenQuintiles) == Quintile::Q1);
    }
}

TEST_CASE("feature marginals follow the spec means") {
    const WorkloadSpec spec = reference_spec();
    REQUIRE(spec.n_requests >= 1000);
    const auto reqs = generate_workload(spec);
    std::array<double, 4> img{};
    TextAxes txt{};
    for (const auto& r : reqs) {
        img[0] += r.image.blur;
        img[1] += r.image.exposure;
        img[2] += r.image.artifacts;
        img[3] += r.image.detail;
        for (std::size_t k = 0; k < kTextAxisCount; ++k) txt[k] += r.text_axes[k];
    }
    const double n = static_cast<double>(reqs.size());
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(img[k] / n - spec.image[k].mean) <= 0.05);
    for (std::size_t k = 0; k < kTextAxisCount; ++k) CHECK(std::abs(txt[k] / n - spec.text[k].mean) <= 0.05);
}

TEST_CASE("shipped quintile cuts split the reference workload evenly") {
    const auto reqs = generate_workload(reference_spec());
    const CalibratedBundle bundle = load_bundle_file(oracle::config_file("bundle.json"));
    std::array<int, 5> counts{};
    for (const auto& r : reqs) {
        ++counts[static_cast<int>(complexity_quintile(describe(r.image, r.text_axes, bundle).complexity, bundle.quintiles)) - 1];
    }
    for (int c : counts) CHECK(std::abs(c - static_cast<int>(reqs.size()) / 5) <= static_cast<int>(reqs.size()) / 100);
}

TEST_CASE("bad workload specs") {
    WorkloadSpec spec;
    spec.n_requests = 0;
    CHECK_THROWS_AS(validate(spec), Error);
    spec = WorkloadSpec{};
    spec.image[0].concentration = 0.0;
    CHECK_THROWS_AS(validate(spec), Error);
    spec = WorkloadSpec{};
    spec.text[2].mean = 1.5;
    CHECK_THROWS_AS(validate(spec), Error);
}

TEST_CASE("raw-image mode extracts features from rendered requests") {
    WorkloadSpec spec = reference_spec();
    spec.n_requests = 40;
    spec.raw_images = true;
    spec.raw_image_size = 64;
    const auto reqs = generate_workload(spec);
    for (const auto& r : reqs) {
        CHECK_FALSE(r.question.empty());
        for (double v : {r.image.blur, r.image.exposure, r.image.artifacts, r.image.detail}) CHECK((v >= 0.0 && v <= 1.0));
        CHECK(r.text_axes == text_axes(r.question));
    }
    // Rendered degradation shows up in the measured scores.
    const RawRequest sharp = render_raw_request(9, 96, 1.0, 1.0, 1.0, 0.8, 0.3);
    const RawRequest blurry = render_raw_request(9, 96, 0.1, 1.0, 1.0, 0.8, 0.3);
    CHECK(analyze_image(blurry.image).blur < analyze_image(sharp.image).blur);
}

TEST_CASE("degenerate success probabilities") {
    PoolConfig pool = reference_pool();
    TruthConfig truth = reference_truth();
    truth.noise_scale = 0.0;
    ModelProfile m = pool.at("qwen3-vl-8b");
    m.strengths = {1.0, 1.0, 1.0};
    truth.base[m.id] = 1.0;
    Request easy;
    easy.image = make_image_quality(1, 1, 1, 0);
    for (std::uint64_t id = 0; id < 200; ++id) {
        easy.id = id;
        CHECK(success_probability(easy, m, m.calibration_resolution, truth, 1) == 1.0);
        CHECK(true_outcome(easy, m, m.calibration_resolution, truth, id));
    }
    truth.base[m.id] = 0.0;
    Request hard;
    hard.image = make_image_quality(0, 0, 0, 0);
    hard.text_axes.fill(1.0);
    for (std::uint64_t id = 0; id < 200; ++id) {
        hard.id = id;
        CHECK_FALSE(true_outcome(hard, m, m.calibration_resolution, truth, id));
    }
}

TEST_CASE("generated accuracies track the configured targets") {
    const PoolConfig pool = load_pool_file(oracle::config_file("pool.yaml"));
    const TruthConfig truth = reference_truth();
    const auto reqs = generate_workload(reference_spec());
    double edge_target = 0.0, cloud_target = 0.0, edge_acc = 0.0, cloud_acc = 0.0;
    for (const auto& m : pool.profiles) {
        double hits = 0.0;
        for (const auto& r : reqs) hits += true_outcome(r, m, m.calibration_resolution, truth, 1);
        const double acc = hits / static_cast<double>(reqs.size());
        const double target = truth.targets.at(m.id);
        CHECK(std::abs(acc - target) <= 0.015);
        (m.tier == Tier::Edge ? edge_acc : cloud_acc) += acc / 2.0;
        (m.tier == Tier::Edge ? edge_target : cloud_target) += target / 2.0;
    }
    CHECK(edge_target == doctest::Approx(0.665));
    CHECK(cloud_target == doctest::Approx(0.744));
    CHECK(std::abs(edge_acc - 0.665) <= 0.015);
    CHECK(std::abs(cloud_acc - 0.744) <= 0.015);
}

TEST_CASE("outcomes are keyed by request, model and seed") {
    const PoolConfig pool = load_pool_file(oracle::config_file("pool.yaml"));
    const TruthConfig truth = reference_truth();
    WorkloadSpec spec = reference_spec();
    spec.n_requests = 500;
    const auto reqs = generate_workload(spec);
    const ModelProfile& m = pool.at("qwen3-vl-2b");
    int differs = 0;
    for (const auto& r : reqs) {
        CHECK(true_outcome(r, m, 448, truth, 7) == true_outcome(r, m, 448, truth, 7));
        differs += true_outcome(r, m, 448, truth, 7) != true_outcome(r, m, 448, truth, 8);
        // Higher resolution only raises the probability, and draws are coupled.
        if (true_outcome(r, m, 224, truth, 7)) CHECK(true_outcome(r, m, 448, truth, 7));
    }
    CHECK(differs > 0);
}

TEST_CASE("hidden generator is separate from the router bundle") {
    const auto truth_doc = load_document(oracle::config_file("truth.json"));
    const auto bundle_doc = load_document(oracle::config_file("bundle.json"));
    CHECK(truth_doc["schema"] == "truth/1");
    CHECK(bundle_doc["schema"] == "bundle/1");
    CHECK(canonical_dump(truth_doc) != canonical_dump(bundle_doc));
    const TruthConfig truth = truth_from_json(truth_doc);
    const CalibratedBundle bundle = bundle_from_json(bundle_doc);
    CHECK(truth.res_coeff != bundle.router.quality.res_coeff);
    CHECK(truth.kappa != bundle.router.quality.kappa);
    CHECK(truth.detail_res_scale != bundle.router.quality.detail_res_scale);
    CHECK(truth.beta != bundle.beta);
}

TEST_CASE("transfer arithmetic") {
    CHECK(std::abs(transfer_latency_ms(250'000, 15.0) - 133.3) <= 0.5);
    CHECK(std::abs(transfer_latency_ms(250'000, 300.0) - 6.7) <= 0.5);
    CHECK(transfer_latency_ms(250'000, 15.0) == doctest::Approx(2'000'000.0 / 15e6 * 1000.0));
    CHECK(std::isinf(transfer_latency_ms(250'000, 0.0)));
}

TEST_CASE("log-normal fit matches mean and p95") {
    for (auto [mean, p95] : {std::pair{682.0, 990.0}, {1468.0, 1846.0}, {281.0, 371.0}, {222.0, 282.0}}) {
        const LogNormal ln = fit_lognormal(mean, p95);
        CHECK(std::exp(ln.mu + 0.5 * ln.sigma * ln.sigma) == doctest::Approx(mean).epsilon(1e-9));
        CHECK(std::exp(ln.mu + 1.6448536269514722 * ln.sigma) == doctest::Approx(p95).epsilon(1e-9));
    }
    CHECK(fit_lognormal(500, 500).sigma == 0.0);
}

TEST_CASE("latency model") {
    const PoolConfig pool = reference_pool();
    TierCostModel cost;
    cost.noise = false;
    cost.edge_overhead_ms = 100.0;
    Request r;
    r.id = 3;
    const ModelProfile& e = pool.at("qwen3-vl-2b");
    const ModelProfile& c = pool.at("qwen3-vl-8b");
    const NetworkState net{100.0, 15.0};
    CHECK(simulate_latency(r, e, Tier::Edge, cost, net, 1) == doctest::Approx(682.0 + 20.0 + 100.0));
    // Edge latency carries no transfer term at any bandwidth.
    CHECK(simulate_latency(r, e, Tier::Edge, cost, {1.0, 15.0}, 1) == simulate_latency(r, e, Tier::Edge, cost, net, 1));
    CHECK(simulate_latency(r, c, Tier::Cloud, cost, net, 1) ==
          doctest::Approx(222.0 + 20.0 + 2000.0 + transfer_latency_ms(250'000, 100.0)));

    double prev = 1e18;
    for (double bw : {1.0, 5.0, 10.0, 15.0, 20.0, 50.0, 100.0, 300.0, 1000.0}) {
        const double l = simulate_latency(r, c, Tier::Cloud, cost, {bw, 15.0}, 1);
        CHECK(l < prev);
        prev = l;
    }

    cost.noise = true;
    for (std::uint64_t id = 0; id < 100; ++id) {
        r.id = id;
        const double a = simulate_latency(r, e, Tier::Edge, cost, net, 9);
        CHECK(a == simulate_latency(r, e, Tier::Edge, cost, net, 9));
        CHECK(a > 0.0);
        CHECK(simulate_energy(r, e, Tier::Edge, cost, 9) >= 0.0);
    }
}

TEST_CASE("energy integrator") {
    CHECK(std::abs(integrate_energy({{{0, 50}, {1000, 50}}, 20}) - 30.0) <= 1e-9);
    CHECK(integrate_energy({{{0, 10}, {500, 15}, {1000, 10}}, 20}) == 0.0);
    CHECK(std::abs(integrate_energy({{{0, 20}, {1000, 60}}, 20}) - 20.0) <= 1e-9);

    CHECK_THROWS_AS(integrate_energy({{{0, 20}}, 10}), Error);
    CHECK_THROWS_AS(integrate_energy({{{0, 20}, {0, 30}}, 10}), Error);
    CHECK_THROWS_AS(integrate_energy({{{10, 20}, {5, 30}}, 10}), Error);

    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> p(0.0, 80.0), dt(1.0, 100.0);
    for (int i = 0; i < 2000; ++i) {
        PowerTrace t;
        t.idle_w = p(rng);
        double time = 0.0;
        double expected = 0.0;
        const int n = 2 + i % 30;
        for (int k = 0; k < n; ++k) {
            if (k > 0) time += dt(rng);
            t.samples.push_back({time, p(rng)});
            if (k > 0) {
                const auto& a = t.samples[k - 1];
                const auto& b = t.samples[k];
                expected += oracle::ramp_energy(a.watts, b.watts, t.idle_w, b.t_ms - a.t_ms);
            }
        }
        const double got = integrate_energy(t);
        CHECK(got >= 0.0);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("synthesized power traces integrate to the requested energy") {
    for (double e : {0.0, 1.5, 7.4, 26.0}) {
        const PowerTrace t = synthesize_power_trace(824.0, e, 12.0, 50.0);
        CHECK(integrate_energy(t) == doctest::Approx(e).epsilon(1e-9));
        for (std::size_t i = 1; i < t.samples.size(); ++i) CHECK(t.samples[i].t_ms > t.samples[i - 1].t_ms);
    }
}

TEST_CASE("simulation is reproducible and conserves latency") {
    const RunConfig cfg = load_config({}, {}, [](const char*) -> const char* { return nullptr; });
    Inputs in = load_inputs(cfg);
    in.workload.n_requests = 400;
    const auto reqs = generate_workload(in.workload);
    BenchConfig bench = make_bench_config(in, cfg);
    const ExecutionContext ctx = make_context(bench, StrategyKind::InarVl);

    const auto a = simulate(reqs, ctx, bench.truth, bench.cost, bench.seeds);
    const auto b = simulate(reqs, ctx, bench.truth, bench.cost, bench.seeds);
    CHECK(stream_of(a) == stream_of(b));
    for (const auto& r : a) {
        CHECK(r.latency_ms > 0.0);
        CHECK(r.energy_j >= 0.0);
    }

    // Noise off: every latency is a per-model constant, so the mixed mean is
    // the placement-weighted blend of those constants.
    TierCostModel flat = bench.cost;
    flat.noise = false;
    const auto recs = simulate(reqs, ctx, bench.truth, flat, bench.seeds);
    std::map<std::string, double> per_model;
    Request probe;
    for (const auto& m : ctx.pool.profiles) {
        per_model[m.id] = simulate_latency(probe, m, m.tier, flat, ctx.network, 0);
    }
    double mean = 0.0, blend = 0.0;
    for (const auto& r : recs) {
        mean += r.latency_ms;
        blend += per_model.at(r.model_id);
    }
    CHECK(mean == doctest::Approx(blend).epsilon(1e-12));

    const auto j = to_json(a.front());
    CHECK(j["schema"] == "exec/1");
    for (const char* key : {"id", "strategy", "model", "resolution", "placement", "reason", "score", "latency_ms",
                            "energy_j", "d", "quintile"}) {
        CHECK(j.contains(key));
    }
}

TEST_CASE("oracle execution reads every model") {
    const RunConfig cfg = load_config({}, {}, [](const char*) -> const char* { return nullptr; });
    Inputs in = load_inputs(cfg);
    in.workload.n_requests = 300;
    const auto reqs = generate_workload(in.workload);
    BenchConfig bench = make_bench_config(in, cfg);
    const SimulatedSource source(bench.truth, bench.cost, bench.network, bench.seeds);
    const auto oracle_recs = execute(reqs, make_context(bench, StrategyKind::Oracle), source);
    const PoolConfig pool = apply_bundle(bench.pool, bench.bundle);
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        double best = 0.0;
        for (const auto& m : pool.profiles) best = std::max(best, source.score(reqs[i], m, m.calibration_resolution));
        CHECK(oracle_recs[i].score == best);
        CHECK(oracle_recs[i].reason == DecisionReason::Hindsight);
    }

    bench.network.bandwidth_mbps = 10.0;
    const SimulatedSource slow(bench.truth, bench.cost, bench.network, bench.seeds);
    for (const auto& r : execute(reqs, make_context(bench, StrategyKind::Oracle), slow)) {
        CHECK(r.placement == Tier::Edge);
        CHECK(r.reason == DecisionReason::BandwidthGuard);
    }
}
