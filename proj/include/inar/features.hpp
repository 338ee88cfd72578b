#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace inar {

/// 8-bit luma raster, row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

/// Decodes PNG or JPEG bytes (sniffed from the magic number) to luma.
GrayImage decode_image(std::span<const std::uint8_t> bytes);

/// PNG encoder, used for fixtures and exported procedural images.
std::vector<std::uint8_t> encode_png(const GrayImage& image);

/// Normalization constants for the four image-quality estimators.
struct ImageConfig {
    /// Laplacian variance that maps to a blur score of 1.
    double laplacian_var_ref = 600.0;
    /// Luma levels within this distance of 0 or 255 count as clipped.
    int clip_margin = 2;
    /// Blockiness ratio excess (ratio - 1) that maps to an artifact score of 0.
    double artifact_ratio_ref = 1.0;
    /// Gradient magnitude (on a 0..1 luma scale) above which a pixel counts as detail.
    double detail_threshold = 24.0 / 255.0;
    /// Edge density that maps to a detail score of 1.
    double detail_density_ref = 0.25;
};

/// Quality scores: 1 is best on every axis. `score` is the plain mean.
struct ImageQuality {
    double blur = 0.0;
    double exposure = 0.0;
    double artifacts = 0.0;
    double detail = 0.0;
    double score = 0.0;
};

ImageQuality make_image_quality(double blur, double exposure, double artifacts, double detail);

/// Runs all four estimators. Throws EmptyImage for rasters below 64 pixels.
ImageQuality analyze_image(const GrayImage& image, const ImageConfig& config = {});

inline constexpr std::size_t kTextAxisCount = 6;

enum class TextAxis : std::size_t { Length, EntityDensity, QuestionType, Vocabulary, Reasoning, Context };

using TextAxes = std::array<double, kTextAxisCount>;
using TextWeights = std::array<double, kTextAxisCount>;

inline constexpr TextWeights kUniformTextWeights{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6};

inline double axis(const TextAxes& axes, TextAxis a) { return axes[static_cast<std::size_t>(a)]; }

const char* to_string(TextAxis a) noexcept;

struct TextComplexity {
    TextAxes axes{};
    TextWeights beta = kUniformTextWeights;
    double score = 0.0;
};

/// Lowercased alphanumeric tokens; punctuation and whitespace separate.
std::vector<std::string> tokenize(std::string_view text);

/// Rarity in [0,1] from the embedded frequency list; unlisted words are 1.
double word_rarity(std::string_view lower_word);

TextAxes text_axes(std::string_view question);

/// Combines precomputed axes with weights beta. Throws BadWeights unless beta
/// is nonnegative and sums to one.
TextComplexity combine_text(const TextAxes& axes, const TextWeights& beta = kUniformTextWeights);

TextComplexity analyze_text(std::string_view question, const TextWeights& beta = kUniformTextWeights);

struct FusionWeights {
    double image = 0.5;
    double text = 0.5;
};

/// Per-request demand on the three model strength axes.
struct Needs {
    double blur = 0.0;
    double detail = 0.0;
    double reasoning = 0.0;
};

struct RequestDescriptor {
    ImageQuality image;
    TextComplexity text;
    Needs needs;
    FusionWeights weights;
    /// Joint complexity d; higher is harder.
    double complexity = 0.0;
};

/// d = w_img (1 - s_img) + w_txt c_text, clamped to [0,1]. Throws BadWeights
/// for negative or non-normalized weights.
RequestDescriptor fuse(const ImageQuality& image, const TextComplexity& text, FusionWeights weights = {});

enum class Quintile { Q1 = 1, Q2, Q3, Q4, Q5 };
using QuintileBoundaries = std::array<double, 4>;

inline constexpr QuintileBoundaries kEvenQuintiles{0.2, 0.4, 0.6, 0.8};

const char* to_string(Quintile q) noexcept;

/// Values on a boundary fall into the lower bucket. Throws BadBoundaries
/// unless the cut points are strictly ascending inside (0,1).
Quintile complexity_quintile(double d, const QuintileBoundaries& boundaries);
void validate_boundaries(const QuintileBoundaries& boundaries);

/// Empirical 20/40/60/80th percentiles (lower order statistic).
QuintileBoundaries empirical_quintile_boundaries(std::span<const double> complexities);

struct FeatureConfig {
    ImageConfig image;
    TextWeights beta = kUniformTextWeights;
    FusionWeights weights;
};

struct Extraction {
    RequestDescriptor descriptor;
    double overhead_ms = 0.0;
};

/// Decode + both analyzers + fusion, timed.
Extraction extract(std::span<const std::uint8_t> image_bytes, std::string_view question,
                   const FeatureConfig& config = {});
Extraction extract(const GrayImage& image, std::string_view question, const FeatureConfig& config = {});

// descriptor/1
void to_json(nlohmann::json& j, const ImageQuality& q);
void from_json(const nlohmann::json& j, ImageQuality& q);
nlohmann::json text_axes_to_json(const TextAxes& axes);
TextAxes text_axes_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const RequestDescriptor& d);
void from_json(const nlohmann::json& j, RequestDescriptor& d);

}  // namespace inar
