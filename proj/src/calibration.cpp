#include "inar/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "inar/document.hpp"
#include "inar/error.hpp"

namespace inar {

namespace {

using nlohmann::json;

json finite_or_tag(double v) {
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : "-inf";
}

double finite_or_tag(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw Error(ErrorCode::ParseError, "bad numeric tag '" + s + "'");
    }
    return j.get<double>();
}

// Flattened (record, model, resolution) observation with every term of the
// quality predictor that does not depend on fitted coefficients.
struct Pair {
    std::size_t record = 0;
    std::size_t model = 0;
    double score = 0.0;
    double gap_sq = 0.0;
    double log_res_ratio = 0.0;
    double detail_shortfall = 0.0;
    bool at_calibration = false;
};

struct FitProblem {
    std::vector<double> image_complexity;  // 1 - s_img per record
    std::vector<TextAxes> text;
    std::vector<Pair> pairs;
    std::size_t model_count = 0;
};

struct Coefficients {
    TextWeights beta;
    FusionWeights weights;
    double detail_res_scale = 0.0;
    double res_coeff = 0.0;
    double kappa = 0.0;
};

struct Evaluation {
    double loss = 0.0;
    std::vector<double> intercepts;
};

std::vector<double> complexities(const FitProblem& p, const Coefficients& c) {
    std::vector<double> d(p.text.size());
    for (std::size_t i = 0; i < d.size(); ++i) {
        double text = 0.0;
        for (std::size_t k = 0; k < kTextAxisCount; ++k) text += c.beta[k] * p.text[i][k];
        d[i] = std::clamp(c.weights.image * p.image_complexity[i] + c.weights.text * text, 0.0, 1.0);
    }
    return d;
}

// q = a (1 + d) + rest, rest = res L - kappa G - d - lambda f.
double rest_term(const Pair& pr, double d, const Coefficients& c) {
    return c.res_coeff * pr.log_res_ratio - c.kappa * pr.gap_sq - d - c.detail_res_scale * pr.detail_shortfall;
}

Evaluation evaluate(const FitProblem& p, const Coefficients& c) {
    const std::vector<double> d = complexities(p, c);
    // Anchor each intercept so mean prediction equals mean outcome over the
    // model's calibration-resolution pairs (all pairs if it has none).
    std::vector<double> num(p.model_count, 0.0), den(p.model_count, 0.0);
    std::vector<double> num_all(p.model_count, 0.0), den_all(p.model_count, 0.0);
    for (const auto& pr : p.pairs) {
        const double di = d[pr.record];
        const double residual = pr.score - rest_term(pr, di, c);
        num_all[pr.model] += residual;
        den_all[pr.model] += 1.0 + di;
        if (pr.at_calibration) {
            num[pr.model] += residual;
            den[pr.model] += 1.0 + di;
        }
    }
    Evaluation e;
    e.intercepts.resize(p.model_count);
    for (std::size_t m = 0; m < p.model_count; ++m) {
        const double a = den[m] > 0 ? num[m] / den[m] : (den_all[m] > 0 ? num_all[m] / den_all[m] : 0.0);
        e.intercepts[m] = std::clamp(a, 0.0, 1.0);
    }
    double sse = 0.0;
    for (const auto& pr : p.pairs) {
        const double di = d[pr.record];
        const double q = e.intercepts[pr.model] * (1.0 + di) + rest_term(pr, di, c);
        const double r = pr.score - q;
        sse += r * r;
    }
    e.loss = sse / static_cast<double>(p.pairs.size());
    return e;
}

std::vector<double> grid_values(const GridAxis& axis, const char* name) {
    const double lo = std::max(0.0, axis.lo);
    if (!(axis.step > 0.0) || axis.hi < lo) {
        throw Error(ErrorCode::ConstraintViolation, std::string(name) + " grid is empty after projecting to >= 0");
    }
    std::vector<double> out;
    const auto steps = static_cast<long>(std::floor((axis.hi - lo) / axis.step + 1e-9));
    for (long i = 0; i <= steps; ++i) out.push_back(lo + static_cast<double>(i) * axis.step);
    return out;
}

void enumerate_beta(std::size_t axis_index, int units_left, int free_left, int total_units, TextWeights& current,
                    std::vector<TextWeights>& out) {
    if (axis_index == kTextAxisCount - 1) {
        if (units_left > 0 && free_left == 0) return;
        current[axis_index] = static_cast<double>(units_left) / total_units;
        out.push_back(current);
        return;
    }
    for (int u = 0; u <= units_left; ++u) {
        if (u > 0 && free_left == 0) break;
        current[axis_index] = static_cast<double>(u) / total_units;
        enumerate_beta(axis_index + 1, units_left - u, free_left - (u > 0 ? 1 : 0), total_units, current, out);
    }
}

std::vector<TextWeights> beta_lattice(double step, int max_free) {
    const int units = static_cast<int>(std::lround(1.0 / step));
    if (units <= 0 || std::abs(units * step - 1.0) > 1e-9) {
        throw Error(ErrorCode::ConstraintViolation, "beta step must divide 1");
    }
    std::vector<TextWeights> out;
    TextWeights current{};
    enumerate_beta(0, units, std::max(1, max_free), units, current, out);
    return out;
}

FitProblem build_problem(std::span<const CalibrationRecord> records, const PoolConfig& pool,
                         const QualityParams& quality, FitReport& report) {
    FitProblem p;
    p.model_count = pool.profiles.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        p.image_complexity.push_back(1.0 - rec.image.score);
        p.text.push_back(rec.text_axes);
        Needs needs;
        needs.blur = 1.0 - rec.image.blur;
        needs.detail = rec.image.detail;
        needs.reasoning = rec.text_axes[static_cast<std::size_t>(TextAxis::Reasoning)];
        for (const auto& o : rec.outcomes) {
            std::size_t m = 0;
            while (m < pool.profiles.size() && pool.profiles[m].id != o.model_id) ++m;
            if (m == pool.profiles.size()) continue;
            const auto& profile = pool.profiles[m];
            Pair pr;
            pr.record = i;
            pr.model = m;
            pr.score = o.score;
            for (double g : capability_gaps(needs, profile.strengths)) pr.gap_sq += g * g;
            pr.log_res_ratio = std::log2(static_cast<double>(o.resolution)) -
                               std::log2(static_cast<double>(profile.calibration_resolution));
            if (quality.detail_res_ref > 0) {
                pr.detail_shortfall =
                    rec.image.detail * std::max(0.0, (quality.detail_res_ref - o.resolution) / quality.detail_res_ref);
            }
            pr.at_calibration = o.resolution == profile.calibration_resolution;
            if (pr.log_res_ratio != 0.0) report.res_coeff_identifiable = true;
            if (pr.detail_shortfall > 0.0) report.detail_res_identifiable = true;
            p.pairs.push_back(pr);
        }
    }
    report.pairs = p.pairs.size();
    return p;
}

// Runs one coordinate: keeps the current value unless a grid value is
// strictly better.
template <typename T, typename Apply>
bool sweep(const FitProblem& p, Coefficients& coeffs, double& best_loss, const std::vector<T>& values, Apply apply) {
    bool changed = false;
    for (const auto& v : values) {
        Coefficients trial = coeffs;
        apply(trial, v);
        const double loss = evaluate(p, trial).loss;
        if (loss < best_loss) {
            best_loss = loss;
            coeffs = trial;
            changed = true;
        }
    }
    return changed;
}

}  // namespace

void validate_record(const CalibrationRecord& record, const PoolConfig& pool) {
    for (const auto& o : record.outcomes) {
        if (pool.find(o.model_id) == nullptr) {
            throw Error(ErrorCode::SchemaMismatch, "record " + record.id + ": unknown model '" + o.model_id + "'");
        }
        if (!(o.score >= 0.0 && o.score <= 1.0)) {
            throw Error(ErrorCode::SchemaMismatch, "record " + record.id + ": score outside [0,1]");
        }
    }
    for (const auto& m : pool.profiles) {
        const bool covered = std::any_of(record.outcomes.begin(), record.outcomes.end(),
                                         [&](const Outcome& o) { return o.model_id == m.id; });
        if (!covered) {
            throw Error(ErrorCode::PartialCoverage, "record " + record.id + " has no outcome for '" + m.id + "'");
        }
    }
}

json to_json(const CalibrationRecord& record) {
    json outcomes = json::array();
    for (const auto& o : record.outcomes) {
        outcomes.push_back({{"model", o.model_id}, {"resolution", o.resolution}, {"score", o.score}});
    }
    return {{"schema", "calrec/1"},
            {"id", record.id},
            {"image", record.image},
            {"text_axes", text_axes_to_json(record.text_axes)},
            {"outcomes", outcomes}};
}

CalibrationRecord calibration_record_from_json(const json& j) {
    require_schema(j, "calrec/1", "calibration record");
    CalibrationRecord rec;
    try {
        rec.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
        if (j.contains("descriptor")) {
            const auto& d = j.at("descriptor");
            rec.image = d.at("image").get<ImageQuality>();
            rec.text_axes = text_axes_from_json(d.at("text").at("axes"));
        } else {
            rec.image = j.at("image").get<ImageQuality>();
            rec.text_axes = text_axes_from_json(j.at("text_axes"));
        }
        for (const auto& o : j.at("outcomes")) {
            rec.outcomes.push_back({o.at("model").get<std::string>(), o.at("resolution").get<int>(),
                                    o.at("score").get<double>()});
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaMismatch, std::string("calibration record: ") + e.what());
    }
    return rec;
}

std::vector<CalibrationRecord> read_calibration_records(const std::filesystem::path& path, const PoolConfig& pool) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    std::vector<CalibrationRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const json j = parse_document(line, path.string() + ":" + std::to_string(line_no), false);
        out.push_back(calibration_record_from_json(j));
        validate_record(out.back(), pool);
    }
    return out;
}

void write_calibration_records(const std::filesystem::path& path, std::span<const CalibrationRecord> records) {
    std::string text;
    for (const auto& r : records) text += to_json(r).dump() + "\n";
    write_text_file(path, text);
}

AccuracyEstimate estimate_accuracy(std::span<const CalibrationRecord> records, std::string_view model_id,
                                   std::optional<int> resolution) {
    AccuracyEstimate est;
    double sum = 0.0;
    for (const auto& rec : records) {
        for (const auto& o : rec.outcomes) {
            if (o.model_id != model_id) continue;
            if (resolution && o.resolution != *resolution) continue;
            sum += o.score;
            ++est.count;
        }
    }
    if (est.count == 0) throw Error(ErrorCode::NoRecords, "no outcomes for '" + std::string(model_id) + "'");
    est.accuracy = sum / static_cast<double>(est.count);
    return est;
}

CalibratedBundle default_bundle(const PoolConfig& pool) {
    CalibratedBundle b;
    for (const auto& m : pool.profiles) b.models[m.id] = {m.accuracy, m.accuracy, 0};
    return b;
}

PoolConfig apply_bundle(const PoolConfig& pool, const CalibratedBundle& bundle) {
    PoolConfig out = pool;
    for (auto& m : out.profiles) {
        const auto it = bundle.models.find(m.id);
        if (it != bundle.models.end()) m.accuracy = it->second.a_m;
    }
    return out;
}

FeatureConfig feature_config(const CalibratedBundle& bundle, const ImageConfig& image) {
    FeatureConfig cfg;
    cfg.image = image;
    cfg.beta = bundle.beta;
    cfg.weights = bundle.weights;
    return cfg;
}

RequestDescriptor describe(const ImageQuality& image, const TextAxes& text_axes, const CalibratedBundle& bundle) {
    return fuse(image, combine_text(text_axes, bundle.beta), bundle.weights);
}

json to_json(const CalibratedBundle& b) {
    json models = json::object();
    for (const auto& [id, m] : b.models) models[id] = {{"a_m", m.a_m}, {"measured", m.measured}, {"count", m.count}};
    const auto& q = b.router.quality;
    const auto& c = b.router.cost;
    json doc = {
        {"schema", "bundle/1"},
        {"models", models},
        {"beta", b.beta},
        {"weights", {{"w_img", b.weights.image}, {"w_txt", b.weights.text}}},
        {"quality",
         {{"res_coeff", q.res_coeff},
          {"kappa", q.kappa},
          {"detail_res_scale", q.detail_res_scale},
          {"detail_res_ref", q.detail_res_ref},
          {"precision_delta", {{"INT8", q.precision_delta[0]}, {"FP16", q.precision_delta[1]}}}}},
        {"cost",
         {{"energy_weight", c.energy_weight},
          {"cloud_energy", c.cloud_energy},
          {"int8_factor", c.int8_factor},
          {"fp16_factor", c.fp16_factor},
          {"resolution_anchor", c.resolution_anchor},
          {"network_coeff", c.network_coeff},
          {"network_bw_scale", c.network_bw_scale},
          {"bandwidth_floor_mbps", c.bandwidth_floor_mbps}}},
        {"rule", {{"tau_edge", finite_or_tag(b.router.rule.tau_edge)}, {"delta_min", b.router.rule.delta_min}}},
        {"quintiles", b.quintiles},
        {"provenance",
         {{"seed", b.provenance.seed}, {"records", b.provenance.records}, {"timestamp", b.provenance.timestamp}}},
        {"frozen", b.frozen},
    };
    if (!b.hash.empty()) doc["hash"] = b.hash;
    return doc;
}

CalibratedBundle bundle_from_json(const json& doc) {
    require_schema(doc, "bundle/1", "bundle");
    CalibratedBundle b;
    try {
        for (const auto& [id, m] : doc.at("models").items()) {
            b.models[id] = {m.at("a_m").get<double>(), m.value("measured", m.at("a_m").get<double>()),
                            m.value("count", std::size_t{0})};
        }
        b.beta = doc.at("beta").get<TextWeights>();
        b.weights = {doc.at("weights").at("w_img").get<double>(), doc.at("weights").at("w_txt").get<double>()};
        auto& q = b.router.quality;
        const auto& jq = doc.at("quality");
        q.res_coeff = jq.at("res_coeff").get<double>();
        q.kappa = jq.at("kappa").get<double>();
        q.detail_res_scale = jq.at("detail_res_scale").get<double>();
        q.detail_res_ref = jq.at("detail_res_ref").get<double>();
        if (jq.contains("precision_delta")) {
            q.precision_delta = {jq["precision_delta"].value("INT8", 0.0), jq["precision_delta"].value("FP16", 0.0)};
        }
        auto& c = b.router.cost;
        const auto& jc = doc.at("cost");
        c.energy_weight = jc.value("energy_weight", c.energy_weight);
        c.cloud_energy = jc.value("cloud_energy", c.cloud_energy);
        c.int8_factor = jc.value("int8_factor", c.int8_factor);
        c.fp16_factor = jc.value("fp16_factor", c.fp16_factor);
        c.resolution_anchor = jc.value("resolution_anchor", c.resolution_anchor);
        c.network_coeff = jc.value("network_coeff", c.network_coeff);
        c.network_bw_scale = jc.value("network_bw_scale", c.network_bw_scale);
        c.bandwidth_floor_mbps = jc.value("bandwidth_floor_mbps", c.bandwidth_floor_mbps);
        b.router.rule.tau_edge = finite_or_tag(doc.at("rule").at("tau_edge"));
        b.router.rule.delta_min = doc.at("rule").at("delta_min").get<double>();
        b.quintiles = doc.at("quintiles").get<QuintileBoundaries>();
        if (doc.contains("provenance")) {
            const auto& p = doc["provenance"];
            b.provenance.seed = p.value("seed", std::uint64_t{0});
            b.provenance.records = p.value("records", std::size_t{0});
            b.provenance.timestamp = p.value("timestamp", std::string{});
        }
        b.frozen = doc.value("frozen", false);
        b.hash = doc.value("hash", std::string{});
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bundle: ") + e.what());
    }
    validate_boundaries(b.quintiles);
    (void)combine_text(TextAxes{}, b.beta);
    return b;
}

CalibratedBundle load_bundle_file(const std::filesystem::path& path) { return bundle_from_json(load_document(path)); }

std::string content_hash(const CalibratedBundle& bundle) {
    json doc = to_json(bundle);
    doc.erase("hash");
    return sha256_hex(canonical_dump(doc));
}

void freeze(CalibratedBundle& bundle) {
    bundle.frozen = true;
    bundle.hash.clear();
    bundle.hash = content_hash(bundle);
}

bool verify(const CalibratedBundle& bundle) { return bundle.frozen && bundle.hash == content_hash(bundle); }

CalibratedBundle fit_coefficients(std::span<const CalibrationRecord> records, const PoolConfig& pool,
                                  const CalibratedBundle& initial, const FitOptions& options, FitReport* report_out) {
    if (records.empty()) throw Error(ErrorCode::NoRecords, "no calibration records");
    for (const auto& rec : records) validate_record(rec, pool);

    // Coverage is judged on the starting weights with even quintile cuts.
    std::set<Quintile> covered;
    for (const auto& rec : records) {
        covered.insert(complexity_quintile(describe(rec.image, rec.text_axes, initial).complexity, kEvenQuintiles));
    }
    if (covered.size() < 2) {
        throw Error(ErrorCode::InsufficientCoverage, "calibration records span fewer than two complexity quintiles");
    }

    FitReport report;
    const FitProblem problem = build_problem(records, pool, initial.router.quality, report);
    if (problem.pairs.empty()) throw Error(ErrorCode::NoRecords, "no outcomes for pool models");

    const auto lambda_grid = grid_values(options.detail_res_scale, "detail_res_scale");
    const auto res_grid = options.fit_res_coeff ? grid_values(options.res_coeff, "res_coeff") : std::vector<double>{};
    const auto kappa_grid = options.fit_kappa ? grid_values(options.kappa, "kappa") : std::vector<double>{};
    const auto betas = options.fit_beta ? beta_lattice(options.beta_step, options.beta_max_free_axes)
                                        : std::vector<TextWeights>{};

    Coefficients coeffs;
    coeffs.beta = initial.beta;
    coeffs.weights = initial.weights;
    coeffs.detail_res_scale = std::max(0.0, initial.router.quality.detail_res_scale);
    coeffs.res_coeff = std::max(0.0, initial.router.quality.res_coeff);
    coeffs.kappa = std::max(0.0, initial.router.quality.kappa);

    double best = evaluate(problem, coeffs).loss;
    int rounds = 0;
    for (; rounds < options.max_rounds; ++rounds) {
        bool changed = false;
        if (report.detail_res_identifiable) {
            changed |= sweep(problem, coeffs, best, lambda_grid, [](Coefficients& c, double v) { c.detail_res_scale = v; });
        }
        changed |= sweep(problem, coeffs, best, betas, [](Coefficients& c, const TextWeights& v) { c.beta = v; });
        if (report.res_coeff_identifiable) {
            changed |= sweep(problem, coeffs, best, res_grid, [](Coefficients& c, double v) { c.res_coeff = v; });
        }
        changed |= sweep(problem, coeffs, best, kappa_grid, [](Coefficients& c, double v) { c.kappa = v; });
        if (!changed) break;
    }
    report.rounds = rounds + 1;

    const Evaluation final_eval = evaluate(problem, coeffs);
    report.loss = final_eval.loss;

    CalibratedBundle out = initial;
    out.frozen = false;
    out.hash.clear();
    out.beta = coeffs.beta;
    out.router.quality.detail_res_scale = coeffs.detail_res_scale;
    out.router.quality.res_coeff = coeffs.res_coeff;
    out.router.quality.kappa = coeffs.kappa;
    for (std::size_t m = 0; m < pool.profiles.size(); ++m) {
        const auto& id = pool.profiles[m].id;
        ModelCalibration mc;
        mc.a_m = final_eval.intercepts[m];
        try {
            const auto est = estimate_accuracy(records, id, pool.profiles[m].calibration_resolution);
            mc.measured = est.accuracy;
            mc.count = est.count;
        } catch (const Error&) {
            const auto est = estimate_accuracy(records, id);
            mc.measured = est.accuracy;
            mc.count = est.count;
        }
        out.models[id] = mc;
    }

    std::vector<double> ds;
    ds.reserve(records.size());
    for (const auto& rec : records) ds.push_back(describe(rec.image, rec.text_axes, out).complexity);
    try {
        out.quintiles = empirical_quintile_boundaries(ds);
    } catch (const Error&) {
        // Degenerate spread: keep the previous cut points.
    }
    out.provenance.seed = options.seed;
    out.provenance.records = records.size();

    validate_constraints(out, pool);
    if (report_out != nullptr) *report_out = report;
    return out;
}

double edge_fraction(std::span<const RequestDescriptor> descriptors, const PoolConfig& pool,
                     const NetworkState& network, const RouterParams& params) {
    if (descriptors.empty()) return 0.0;
    std::size_t edge = 0;
    for (const auto& d : descriptors) {
        if (route(d, pool, network, params).chosen.config.placement == Tier::Edge) ++edge;
    }
    return static_cast<double>(edge) / static_cast<double>(descriptors.size());
}

double fit_tau_edge(std::span<const RequestDescriptor> descriptors, const PoolConfig& pool,
                    const NetworkState& network, const RouterParams& params, double target, double tolerance) {
    if (descriptors.empty()) throw Error(ErrorCode::NoRecords, "no descriptors for operating-point fit");
    if (target >= 1.0) return -std::numeric_limits<double>::infinity();

    // With the guard active every tau yields 100% edge.
    if (network.guard_active()) {
        throw Error(ErrorCode::TargetUnreachable, "bandwidth guard forces all requests to the edge");
    }

    // Per request: best edge quality and whether the cloud gain clears delta_min.
    std::vector<double> edge_quality;
    std::vector<bool> cloud_wins;
    for (const auto& d : descriptors) {
        const auto frontier = pareto_frontier(score_candidates(d, pool, network, params));
        const ScoredCandidate* e = nullptr;
        const ScoredCandidate* c = nullptr;
        for (const auto& s : frontier) (s.config.placement == Tier::Edge ? e : c) = &s;
        if (e == nullptr) {
            edge_quality.push_back(std::numeric_limits<double>::infinity());
            cloud_wins.push_back(true);
            continue;
        }
        edge_quality.push_back(e->quality);
        cloud_wins.push_back(c != nullptr && c->quality - e->quality > params.rule.delta_min);
    }
    const double n = static_cast<double>(descriptors.size());
    auto fraction_at = [&](double tau) {
        std::size_t edge = 0;
        for (std::size_t i = 0; i < edge_quality.size(); ++i) {
            if (std::isfinite(edge_quality[i]) && (edge_quality[i] >= tau || !cloud_wins[i])) ++edge;
        }
        return static_cast<double>(edge) / n;
    };

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double q : edge_quality) {
        if (!std::isfinite(q)) continue;
        lo = std::min(lo, q);
        hi = std::max(hi, q);
    }
    if (!std::isfinite(lo)) throw Error(ErrorCode::TargetUnreachable, "no edge candidates");
    hi = std::nextafter(hi, std::numeric_limits<double>::infinity()) + 1e-6;

    const double ceiling = fraction_at(lo);
    const double floor = fraction_at(hi);
    if (std::abs(floor - target) <= tolerance) return hi;
    if (floor > target + tolerance || ceiling < target - tolerance) {
        throw Error(ErrorCode::TargetUnreachable, "edge fraction range [" + std::to_string(floor) + ", " +
                                                      std::to_string(ceiling) + "] does not reach " +
                                                      std::to_string(target));
    }

    // fraction_at is non-increasing in tau: lo keeps too many, hi too few.
    // Keep bisecting past the tolerance band and return the closest point.
    double best_tau = lo;
    double best_err = std::abs(ceiling - target);
    for (int iter = 0; iter < 200 && best_err > 0.0; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f = fraction_at(mid);
        if (std::abs(f - target) < best_err) {
            best_err = std::abs(f - target);
            best_tau = mid;
        }
        (f > target ? lo : hi) = mid;
    }
    if (best_err > tolerance) throw Error(ErrorCode::TargetUnreachable, "edge fraction jumps over the target band");
    return best_tau;
}

void validate_constraints(const CalibratedBundle& bundle, const PoolConfig& raw_pool) {
    const auto& q = bundle.router.quality;
    if (q.res_coeff < 0.0) throw Error(ErrorCode::ConstraintViolation, "res_coeff < 0: resolution would reduce quality");
    if (q.detail_res_scale < 0.0) throw Error(ErrorCode::ConstraintViolation, "detail_res_scale < 0");
    if (q.kappa < 0.0) throw Error(ErrorCode::ConstraintViolation, "kappa < 0: larger gaps would improve quality");

    const PoolConfig pool = apply_bundle(raw_pool, bundle);
    const double probe_levels[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    for (const auto& m : pool.profiles) {
        for (double level : probe_levels) {
            RequestDescriptor d;
            d.image = make_image_quality(1.0 - level, 0.5, 0.5, level);
            d.needs = {level, level, level};
            d.complexity = level;

            // Resolution never hurts.
            double previous = -std::numeric_limits<double>::infinity();
            for (int r = 64; r <= 2 * m.calibration_resolution; r += 16) {
                const double quality = predict_quality({m.id, m.precision, r, m.tier}, d, m, q);
                if (quality < previous - 1e-12) {
                    throw Error(ErrorCode::ConstraintViolation, m.id + ": quality decreases with resolution");
                }
                previous = quality;
            }

            // Larger needs never help.
            const Configuration cfg{m.id, m.precision, m.calibration_resolution, m.tier};
            const double base = predict_quality(cfg, d, m, q);
            for (int axis_index = 0; axis_index < 3; ++axis_index) {
                RequestDescriptor harder = d;
                double* need = axis_index == 0 ? &harder.needs.blur
                                               : (axis_index == 1 ? &harder.needs.detail : &harder.needs.reasoning);
                *need = std::min(1.0, *need + 0.2);
                if (predict_quality(cfg, harder, m, q) > base + 1e-12) {
                    throw Error(ErrorCode::ConstraintViolation, m.id + ": a larger need-strength gap improves quality");
                }
            }
        }
    }

    // Complexity hurts weaker models more: compare the d=0 -> d=1 drop.
    auto complexity_drop = [&](const ModelProfile& m) {
        RequestDescriptor easy;
        RequestDescriptor hard;
        hard.complexity = 1.0;
        const Configuration cfg{m.id, m.precision, m.calibration_resolution, m.tier};
        return predict_quality(cfg, easy, m, q) - predict_quality(cfg, hard, m, q);
    };
    for (const auto& weak : pool.profiles) {
        for (const auto& strong : pool.profiles) {
            if (weak.accuracy < strong.accuracy && complexity_drop(weak) < complexity_drop(strong) - 1e-12) {
                throw Error(ErrorCode::ConstraintViolation,
                            "complexity hurts " + strong.id + " more than weaker " + weak.id);
            }
        }
    }
}

}  // namespace inar
