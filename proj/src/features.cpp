#include <algorithm>
#include <chrono>
#include <cmath>
#include <vector>

#include "inar/error.hpp"
#include "inar/features.hpp"

namespace inar {

RequestDescriptor fuse(const ImageQuality& image, const TextComplexity& text, FusionWeights weights) {
    if (!(weights.image >= 0.0) || !(weights.text >= 0.0)) {
        throw Error(ErrorCode::BadWeights, "fusion weights must be nonnegative");
    }
    if (std::abs(weights.image + weights.text - 1.0) > 1e-9) {
        throw Error(ErrorCode::BadWeights, "fusion weights must sum to 1");
    }
    RequestDescriptor d;
    d.image = image;
    d.text = text;
    d.weights = weights;
    d.complexity = std::clamp(weights.image * (1.0 - image.score) + weights.text * text.score, 0.0, 1.0);
    d.needs.blur = 1.0 - image.blur;
    d.needs.detail = image.detail;
    d.needs.reasoning = axis(text.axes, TextAxis::Reasoning);
    return d;
}

const char* to_string(Quintile q) noexcept {
    switch (q) {
        case Quintile::Q1: return "Q1";
        case Quintile::Q2: return "Q2";
        case Quintile::Q3: return "Q3";
        case Quintile::Q4: return "Q4";
        case Quintile::Q5: return "Q5";
    }
    return "?";
}

void validate_boundaries(const QuintileBoundaries& b) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!(b[i] > 0.0 && b[i] < 1.0)) throw Error(ErrorCode::BadBoundaries, "cut points must lie in (0,1)");
        if (i > 0 && !(b[i] > b[i - 1])) throw Error(ErrorCode::BadBoundaries, "cut points must be strictly ascending");
    }
}

Quintile complexity_quintile(double d, const QuintileBoundaries& boundaries) {
    validate_boundaries(boundaries);
    int bucket = 1;
    for (double cut : boundaries) {
        if (d <= cut) break;
        ++bucket;
    }
    return static_cast<Quintile>(bucket);
}

QuintileBoundaries empirical_quintile_boundaries(std::span<const double> complexities) {
    if (complexities.size() < 5) throw Error(ErrorCode::BadBoundaries, "need at least five values for quintiles");
    std::vector<double> sorted(complexities.begin(), complexities.end());
    std::sort(sorted.begin(), sorted.end());
    QuintileBoundaries out{};
    const std::size_t n = sorted.size();
    for (std::size_t k = 1; k <= 4; ++k) {
        // ceil(k n / 5) values end up at or below the cut.
        const std::size_t rank = (k * n + 4) / 5;
        out[k - 1] = sorted[rank - 1];
    }
    validate_boundaries(out);
    return out;
}

Extraction extract(const GrayImage& image, std::string_view question, const FeatureConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const ImageQuality quality = analyze_image(image, config.image);
    const TextComplexity text = analyze_text(question, config.beta);
    Extraction out;
    out.descriptor = fuse(quality, text, config.weights);
    out.overhead_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

Extraction extract(std::span<const std::uint8_t> image_bytes, std::string_view question, const FeatureConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    const GrayImage image = decode_image(image_bytes);
    Extraction out = extract(image, question, config);
    out.overhead_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
}

void to_json(nlohmann::json& j, const ImageQuality& q) {
    j = nlohmann::json{{"s_blur", q.blur}, {"s_exp", q.exposure}, {"s_art", q.artifacts},
                       {"s_detail", q.detail}, {"s_img", q.score}};
}

void from_json(const nlohmann::json& j, ImageQuality& q) {
    q = make_image_quality(j.at("s_blur").get<double>(), j.at("s_exp").get<double>(), j.at("s_art").get<double>(),
                           j.at("s_detail").get<double>());
}

nlohmann::json text_axes_to_json(const TextAxes& axes) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t i = 0; i < kTextAxisCount; ++i) j[to_string(static_cast<TextAxis>(i))] = axes[i];
    return j;
}

TextAxes text_axes_from_json(const nlohmann::json& j) {
    TextAxes axes{};
    if (j.is_array()) {
        if (j.size() != kTextAxisCount) throw Error(ErrorCode::SchemaMismatch, "text axes need six values");
        for (std::size_t i = 0; i < kTextAxisCount; ++i) axes[i] = j[i].get<double>();
        return axes;
    }
    for (std::size_t i = 0; i < kTextAxisCount; ++i) axes[i] = j.at(to_string(static_cast<TextAxis>(i))).get<double>();
    return axes;
}

void to_json(nlohmann::json& j, const RequestDescriptor& d) {
    j = nlohmann::json{
        {"schema", "descriptor/1"},
        {"image", d.image},
        {"text", {{"axes", text_axes_to_json(d.text.axes)}, {"beta", d.text.beta}, {"c_text", d.text.score}}},
        {"needs", {{"blur", d.needs.blur}, {"detail", d.needs.detail}, {"reasoning", d.needs.reasoning}}},
        {"weights", {{"w_img", d.weights.image}, {"w_txt", d.weights.text}}},
        {"d", d.complexity},
    };
}

// Derived fields (s_img, c_text, needs, d) are recomputed rather than trusted.
void from_json(const nlohmann::json& j, RequestDescriptor& d) {
    const ImageQuality image = j.at("image").get<ImageQuality>();
    const auto& text = j.at("text");
    TextWeights beta = kUniformTextWeights;
    if (text.contains("beta")) beta = text.at("beta").get<TextWeights>();
    FusionWeights weights;
    if (j.contains("weights")) {
        weights.image = j.at("weights").at("w_img").get<double>();
        weights.text = j.at("weights").at("w_txt").get<double>();
    }
    d = fuse(image, combine_text(text_axes_from_json(text.at("axes")), beta), weights);
}

}  // namespace inar
