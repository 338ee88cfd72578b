#include <algorithm>
#include <cmath>
#include <random>

#include <boost/math/special_functions/beta.hpp>

#include "inar/error.hpp"
#include "inar/simulator.hpp"

namespace inar {

namespace {

constexpr const char* kImageAxisNames[] = {"blur", "exposure", "artifacts", "detail"};

// Questions grouped by increasing difficulty.
const std::vector<std::vector<const char*>>& question_templates() {
    static const std::vector<std::vector<const char*>> levels = {
        {"What color is the car?", "Is there a dog?", "What is the total?", "What is on the table?"},
        {"Which sign is red?", "Where is the cat sitting?", "Who is holding the umbrella?",
         "When does the store open?"},
        {"How many people are waiting at the bus stop?", "What does the label on the bottle say?",
         "Which brand of cereal is on the top shelf?"},
        {"How much does the large pizza cost according to the menu?",
         "Which of these two buses arrives first at Central Station?",
         "What number is written on the jersey of the player near the goal?"},
        {"Why is the man on the left holding that umbrella if it is not raining?",
         "Compare the two prices on these labels and explain the difference.",
         "How does the chart show that sales in 2019 were higher than in 2017?"},
        {"Why is the object on the left heavier than that one, and how does this compare with the other one on the "
         "right?",
         "Explain how the 3 Marlborough signs differ from those near the Eiffel Tower and why that matters.",
         "If the train from Vienna leaves at 14:35, how much later than the other one does it arrive, and why?"},
    };
    return levels;
}

double sample_axis(const AxisSpec& axis, double latent, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    const double eps = normal(rng);
    if (axis.mean <= 0.0) return 0.0;
    if (axis.mean >= 1.0) return 1.0;
    const double x = axis.loading * latent + std::sqrt(1.0 - axis.loading * axis.loading) * eps;
    const double u = std::clamp(normal_cdf(x), 1e-12, 1.0 - 1e-12);
    return boost::math::ibeta_inv(axis.mean * axis.concentration, (1.0 - axis.mean) * axis.concentration, u);
}

void validate_axis(const AxisSpec& a, const std::string& name) {
    if (!(a.mean >= 0.0 && a.mean <= 1.0)) throw Error(ErrorCode::BadSpec, name + ": mean outside [0,1]");
    if (!(a.concentration > 0.0)) throw Error(ErrorCode::BadSpec, name + ": concentration must be positive");
    if (!(a.loading >= -1.0 && a.loading <= 1.0)) throw Error(ErrorCode::BadSpec, name + ": loading outside [-1,1]");
}

AxisSpec axis_from_json(const nlohmann::json& j) {
    AxisSpec a;
    a.mean = j.at("mean").get<double>();
    a.concentration = j.value("concentration", a.concentration);
    a.loading = j.value("loading", a.loading);
    return a;
}

nlohmann::json axis_to_json(const AxisSpec& a) {
    return {{"mean", a.mean}, {"concentration", a.concentration}, {"loading", a.loading}};
}

void gaussian_blur(GrayImage& img, double sigma) {
    if (sigma < 0.2) return;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
        total += kernel[static_cast<std::size_t>(i + radius)];
    }
    for (double& k : kernel) k /= total;
    const int w = img.width;
    const int h = img.height;
    std::vector<double> tmp(img.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] * img.at(std::clamp(x + i, 0, w - 1), y);
            }
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[static_cast<std::size_t>(i + radius)] *
                       tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            }
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    }
}

void blend_block_means(GrayImage& img, double alpha) {
    if (alpha <= 0.0) return;
    for (int by = 0; by < img.height; by += 8) {
        for (int bx = 0; bx < img.width; bx += 8) {
            const int ex = std::min(bx + 8, img.width);
            const int ey = std::min(by + 8, img.height);
            double sum = 0.0;
            for (int y = by; y < ey; ++y)
                for (int x = bx; x < ex; ++x) sum += img.at(x, y);
            const double mean = sum / ((ex - bx) * (ey - by));
            for (int y = by; y < ey; ++y) {
                for (int x = bx; x < ex; ++x) {
                    const double v = (1.0 - alpha) * img.at(x, y) + alpha * mean;
                    img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
                }
            }
        }
    }
}

}  // namespace

void validate(const WorkloadSpec& spec) {
    if (spec.n_requests < 1) throw Error(ErrorCode::BadSpec, "n_requests must be at least 1");
    for (std::size_t i = 0; i < spec.image.size(); ++i) validate_axis(spec.image[i], kImageAxisNames[i]);
    for (std::size_t i = 0; i < spec.text.size(); ++i) validate_axis(spec.text[i], to_string(static_cast<TextAxis>(i)));
    if (spec.raw_images && spec.raw_image_size < 16) throw Error(ErrorCode::BadSpec, "raw_image_size must be >= 16");
}

WorkloadSpec workload_spec_from_json(const nlohmann::json& doc) {
    WorkloadSpec spec;
    try {
        if (doc.contains("schema") && doc["schema"] != "workload/1") {
            throw Error(ErrorCode::SchemaMismatch, "workload: expected schema \"workload/1\"");
        }
        spec.seed = doc.value("seed", spec.seed);
        spec.n_requests = doc.value("n_requests", spec.n_requests);
        spec.raw_images = doc.value("raw_images", spec.raw_images);
        spec.raw_image_size = doc.value("raw_image_size", spec.raw_image_size);
        const auto& image = doc.at("image");
        for (std::size_t i = 0; i < spec.image.size(); ++i) spec.image[i] = axis_from_json(image.at(kImageAxisNames[i]));
        const auto& text = doc.at("text");
        for (std::size_t i = 0; i < spec.text.size(); ++i) {
            spec.text[i] = axis_from_json(text.at(to_string(static_cast<TextAxis>(i))));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::BadSpec, std::string("workload: ") + e.what());
    }
    validate(spec);
    return spec;
}

nlohmann::json to_json(const WorkloadSpec& spec) {
    nlohmann::json image = nlohmann::json::object();
    for (std::size_t i = 0; i < spec.image.size(); ++i) image[kImageAxisNames[i]] = axis_to_json(spec.image[i]);
    nlohmann::json text = nlohmann::json::object();
    for (std::size_t i = 0; i < spec.text.size(); ++i) text[to_string(static_cast<TextAxis>(i))] = axis_to_json(spec.text[i]);
    return {{"schema", "workload/1"}, {"seed", spec.seed},           {"n_requests", spec.n_requests},
            {"raw_images", spec.raw_images}, {"raw_image_size", spec.raw_image_size}, {"image", image},
            {"text", text}};
}

RawRequest render_raw_request(std::uint64_t seed, int size, double blur_quality, double exposure_quality,
                              double artifact_quality, double detail_level, double text_level) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    RawRequest out;
    GrayImage img(size, size);

    // Smooth background: a gradient plus two low-frequency gratings.
    const double fx = 1.0 + 3.0 * uni(rng);
    const double fy = 1.0 + 3.0 * uni(rng);
    const double phase = 6.283185307179586 * uni(rng);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double u = static_cast<double>(x) / size;
            const double v = static_cast<double>(y) / size;
            const double value = 110.0 + 40.0 * u - 20.0 * v + 25.0 * std::sin(6.283185307179586 * fx * u + phase) +
                                 15.0 * std::cos(6.283185307179586 * fy * v);
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(value), 0L, 255L));
        }
    }

    // Glyph-like strokes carry fine detail.
    const int strokes = static_cast<int>(std::lround(std::clamp(detail_level, 0.0, 1.0) * size * size / 30.0));
    std::uniform_int_distribution<int> pos(0, size - 1);
    for (int s = 0; s < strokes; ++s) {
        const int x0 = pos(rng);
        const int y0 = pos(rng);
        const bool vertical = uni(rng) < 0.5;
        const int len = 3 + static_cast<int>(uni(rng) * 5);
        const int delta = uni(rng) < 0.5 ? -90 : 90;
        for (int k = 0; k < len; ++k) {
            const int x = vertical ? x0 : std::min(size - 1, x0 + k);
            const int y = vertical ? std::min(size - 1, y0 + k) : y0;
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(img.at(x, y) + delta, 0, 255));
        }
    }

    gaussian_blur(img, (1.0 - std::clamp(blur_quality, 0.0, 1.0)) * 2.5);

    const double shift = (1.0 - std::clamp(exposure_quality, 0.0, 1.0)) * 140.0 * (uni(rng) < 0.5 ? -1.0 : 1.0);
    if (shift != 0.0) {
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(std::clamp(std::lround(p + shift), 0L, 255L));
    }

    blend_block_means(img, 1.0 - std::clamp(artifact_quality, 0.0, 1.0));
    out.image = std::move(img);

    const auto& levels = question_templates();
    const auto level = std::min(levels.size() - 1, static_cast<std::size_t>(std::clamp(text_level, 0.0, 1.0) * levels.size()));
    const auto& options = levels[level];
    out.question = options[static_cast<std::size_t>(uni(rng) * options.size()) % options.size()];
    return out;
}

std::vector<Request> generate_workload(const WorkloadSpec& spec, const ImageConfig& image_config) {
    validate(spec);
    std::vector<Request> out;
    out.reserve(spec.n_requests);
    for (std::size_t i = 0; i < spec.n_requests; ++i) {
        std::mt19937_64 rng(mix_seed(spec.seed, i));
        std::normal_distribution<double> normal(0.0, 1.0);
        const double latent = normal(rng);
        std::array<double, 4> image{};
        for (std::size_t k = 0; k < image.size(); ++k) image[k] = sample_axis(spec.image[k], latent, rng);
        TextAxes text{};
        for (std::size_t k = 0; k < text.size(); ++k) text[k] = sample_axis(spec.text[k], latent, rng);

        Request r;
        r.id = i;
        if (spec.raw_images) {
            double text_level = 0.0;
            for (double t : text) text_level += t / static_cast<double>(text.size());
            RawRequest raw = render_raw_request(mix_seed(spec.seed ^ 0x5eed, i), spec.raw_image_size, image[0],
                                                image[1], image[2], image[3], text_level);
            r.image = analyze_image(raw.image, image_config);
            r.text_axes = text_axes(raw.question);
            r.question = std::move(raw.question);
        } else {
            r.image = make_image_quality(image[0], image[1], image[2], image[3]);
            r.text_axes = text;
        }
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace inar
