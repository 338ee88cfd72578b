#include <algorithm>
#include <cmath>
#include <random>

#include "inar/error.hpp"
#include "inar/simulator.hpp"

namespace inar {

namespace {

constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;
constexpr std::uint64_t kSharedTag = 0x736861726564ULL;
constexpr std::uint64_t kDrawTag = 0x64726177ULL;

double uniform_open(std::uint64_t key) {
    // 53 random bits mapped strictly inside (0, 1).
    return (static_cast<double>(mix_seed(key, 0x9e3779b97f4a7c15ULL) >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(std::uint64_t key) {
    std::mt19937_64 rng(key);
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(rng);
}

std::uint64_t request_key(std::uint64_t seed, std::uint64_t request_id, std::uint64_t tag) {
    return mix_seed(mix_seed(seed, request_id), tag);
}

double mean_probability(std::span<const Request> requests, const ModelProfile& model, const TruthConfig& truth,
                        std::uint64_t seed) {
    double total = 0.0;
    for (const auto& r : requests) total += success_probability(r, model, model.calibration_resolution, truth, seed);
    return total / static_cast<double>(requests.size());
}

}  // namespace

TruthConfig truth_from_json(const nlohmann::json& doc) {
    TruthConfig t;
    try {
        if (doc.contains("schema") && doc["schema"] != "truth/1") {
            throw Error(ErrorCode::SchemaMismatch, "truth: expected schema \"truth/1\"");
        }
        if (doc.contains("base")) t.base = doc["base"].get<std::map<std::string, double>>();
        if (doc.contains("targets")) t.targets = doc["targets"].get<std::map<std::string, double>>();
        t.res_coeff = doc.value("res_coeff", t.res_coeff);
        t.kappa = doc.value("kappa", t.kappa);
        t.detail_res_scale = doc.value("detail_res_scale", t.detail_res_scale);
        t.detail_res_ref = doc.value("detail_res_ref", t.detail_res_ref);
        if (doc.contains("beta")) t.beta = text_axes_from_json(doc["beta"]);
        if (doc.contains("weights")) {
            t.weights.image = doc["weights"].at("w_img").get<double>();
            t.weights.text = doc["weights"].at("w_txt").get<double>();
        }
        t.noise_scale = doc.value("noise_scale", t.noise_scale);
        t.model_correlation = doc.value("model_correlation", t.model_correlation);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadSpec, std::string("truth: ") + e.what());
    }
    if (t.model_correlation < 0.0 || t.model_correlation > 1.0) {
        throw Error(ErrorCode::BadSpec, "truth: model_correlation outside [0,1]");
    }
    if (t.noise_scale < 0.0) throw Error(ErrorCode::BadSpec, "truth: negative noise_scale");
    return t;
}

nlohmann::json to_json(const TruthConfig& t) {
    return {{"schema", "truth/1"},
            {"base", t.base},
            {"targets", t.targets},
            {"res_coeff", t.res_coeff},
            {"kappa", t.kappa},
            {"detail_res_scale", t.detail_res_scale},
            {"detail_res_ref", t.detail_res_ref},
            {"beta", text_axes_to_json(t.beta)},
            {"weights", {{"w_img", t.weights.image}, {"w_txt", t.weights.text}}},
            {"noise_scale", t.noise_scale},
            {"model_correlation", t.model_correlation}};
}

double success_probability(const Request& request, const ModelProfile& model, int resolution,
                           const TruthConfig& truth, std::uint64_t seed) {
    const RequestDescriptor d = fuse(request.image, combine_text(request.text_axes, truth.beta), truth.weights);
    const auto it = truth.base.find(model.id);
    const double base = it != truth.base.end() ? it->second : model.accuracy;

    double gaps = 0.0;
    for (double g : capability_gaps(d.needs, model.strengths)) gaps += g * g;
    const double res_term = truth.res_coeff * (std::log2(static_cast<double>(resolution)) -
                                               std::log2(static_cast<double>(model.calibration_resolution)));
    double detail_term = 0.0;
    if (truth.detail_res_ref > 0.0) {
        detail_term = truth.detail_res_scale * d.image.detail *
                      std::max(0.0, (truth.detail_res_ref - resolution) / truth.detail_res_ref);
    }
    double p = base + res_term - truth.kappa * gaps - d.complexity * (1.0 - base) - detail_term;
    if (truth.noise_scale > 0.0) {
        const double u = uniform_open(request_key(seed, request.id, mix_seed(kNoiseTag, stable_hash(model.id))));
        p += truth.noise_scale * std::log(u / (1.0 - u));
    }
    return std::clamp(p, 0.0, 1.0);
}

bool true_outcome(const Request& request, const ModelProfile& model, int resolution, const TruthConfig& truth,
                  std::uint64_t seed) {
    const double p = success_probability(request, model, resolution, truth, seed);
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    const double rho = truth.model_correlation;
    const double shared = standard_normal(request_key(seed, request.id, kSharedTag));
    const double own = standard_normal(request_key(seed, request.id, mix_seed(kDrawTag, stable_hash(model.id))));
    const double u = normal_cdf(std::sqrt(rho) * shared + std::sqrt(1.0 - rho) * own);
    return u < p;
}

void solve_truth_bases(TruthConfig& truth, std::span<const Request> requests, const PoolConfig& pool,
                       std::uint64_t seed) {
    if (requests.empty()) throw Error(ErrorCode::BadSpec, "cannot solve truth bases without requests");
    for (const auto& [id, target] : truth.targets) {
        const ModelProfile& model = pool.at(id);
        double lo = 0.0;
        double hi = 1.5;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            truth.base[id] = mid;
            if (mean_probability(requests, model, truth, seed) < target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        truth.base[id] = 0.5 * (lo + hi);
        const double reached = mean_probability(requests, model, truth, seed);
        if (std::abs(reached - target) > 1e-3) {
            throw Error(ErrorCode::TargetUnreachable,
                        "truth base for '" + id + "' cannot reach mean accuracy " + std::to_string(target));
        }
    }
}

std::vector<CalibrationRecord> synthesize_calibration_records(std::span<const Request> requests,
                                                              const PoolConfig& pool, const TruthConfig& truth,
                                                              std::uint64_t seed) {
    std::vector<CalibrationRecord> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
        CalibrationRecord rec;
        rec.id = "r" + std::to_string(r.id);
        rec.image = r.image;
        rec.text_axes = r.text_axes;
        for (const auto& m : pool.profiles) {
            for (int res : m.supported_resolutions) {
                rec.outcomes.push_back({m.id, res, true_outcome(r, m, res, truth, seed) ? 1.0 : 0.0});
            }
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace inar
