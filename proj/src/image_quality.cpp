#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "inar/error.hpp"
#include "inar/features.hpp"

namespace inar {

namespace {

constexpr int kBlock = 8;
constexpr std::size_t kMinPixels = 64;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct InteriorStats {
    double laplacian_variance = 0.0;
    double edge_density = 0.0;
};

// One pass over interior pixels: 3x3 Laplacian moments and central-difference
// gradient counts.
InteriorStats interior_stats(const GrayImage& img, double detail_threshold) {
    InteriorStats stats;
    if (img.width < 3 || img.height < 3) return stats;

    // Central differences are 2x the gradient; compare squared magnitudes.
    const double limit = 2.0 * detail_threshold * 255.0;
    const double limit_sq = limit * limit;

    long long lap_sum = 0;
    long long lap_sq_sum = 0;
    long long edges = 0;
    const int w = img.width;
    const std::uint8_t* p = img.pixels.data();
    for (int y = 1; y < img.height - 1; ++y) {
        const std::uint8_t* up = p + static_cast<std::size_t>(y - 1) * w;
        const std::uint8_t* row = p + static_cast<std::size_t>(y) * w;
        const std::uint8_t* down = p + static_cast<std::size_t>(y + 1) * w;
        for (int x = 1; x < w - 1; ++x) {
            const int lap = up[x] + down[x] + row[x - 1] + row[x + 1] - 4 * row[x];
            lap_sum += lap;
            lap_sq_sum += static_cast<long long>(lap) * lap;
            const int gx = row[x + 1] - row[x - 1];
            const int gy = down[x] - up[x];
            if (static_cast<double>(gx * gx + gy * gy) > limit_sq) ++edges;
        }
    }
    const double n = static_cast<double>(img.width - 2) * static_cast<double>(img.height - 2);
    const double mean = static_cast<double>(lap_sum) / n;
    stats.laplacian_variance = std::max(0.0, static_cast<double>(lap_sq_sum) / n - mean * mean);
    stats.edge_density = static_cast<double>(edges) / n;
    return stats;
}

double exposure_score(const GrayImage& img, int clip_margin) {
    std::array<std::size_t, 256> hist{};
    for (std::uint8_t v : img.pixels) ++hist[v];
    std::size_t clipped = 0;
    double sum = 0.0;
    for (int v = 0; v < 256; ++v) {
        if (v <= clip_margin || v >= 255 - clip_margin) clipped += hist[v];
        sum += static_cast<double>(v) * static_cast<double>(hist[v]);
    }
    const double n = static_cast<double>(img.size());
    const double clip_frac = static_cast<double>(clipped) / n;
    const double mid_dev = std::abs(sum / n - 128.0) / 128.0;
    return clamp01(1.0 - (clip_frac + mid_dev) / 2.0);
}

// Mean absolute luma step across 8x8 block seams over the mean step
// elsewhere. Values near 1 mean no visible blocking.
double blockiness_ratio(const GrayImage& img) {
    long long seam_sum = 0;
    long long all_sum = 0;
    std::size_t seam_n = 0;
    std::size_t all_n = 0;
    const int w = img.width;
    const std::uint8_t* p = img.pixels.data();
    for (int y = 0; y < img.height; ++y) {
        const std::uint8_t* row = p + static_cast<std::size_t>(y) * w;
        long long acc = 0;
        for (int x = 1; x < w; ++x) acc += std::abs(row[x] - row[x - 1]);
        for (int x = kBlock; x < w; x += kBlock) seam_sum += std::abs(row[x] - row[x - 1]);
        all_sum += acc;
        all_n += static_cast<std::size_t>(w - 1);
        seam_n += static_cast<std::size_t>((w - 1) / kBlock);
    }
    for (int y = 1; y < img.height; ++y) {
        const std::uint8_t* above = p + static_cast<std::size_t>(y - 1) * w;
        const std::uint8_t* row = p + static_cast<std::size_t>(y) * w;
        long long acc = 0;
        for (int x = 0; x < w; ++x) acc += std::abs(row[x] - above[x]);
        all_sum += acc;
        all_n += static_cast<std::size_t>(w);
        if (y % kBlock == 0) {
            seam_sum += acc;
            seam_n += static_cast<std::size_t>(w);
        }
    }
    const std::size_t inner_n = all_n - seam_n;
    if (seam_n == 0 || inner_n == 0) return 1.0;
    constexpr double eps = 1e-6;
    const double seam_mean = static_cast<double>(seam_sum) / static_cast<double>(seam_n);
    const double inner_mean = static_cast<double>(all_sum - seam_sum) / static_cast<double>(inner_n);
    return (seam_mean + eps) / (inner_mean + eps);
}

}  // namespace

ImageQuality make_image_quality(double blur, double exposure, double artifacts, double detail) {
    ImageQuality q;
    q.blur = clamp01(blur);
    q.exposure = clamp01(exposure);
    q.artifacts = clamp01(artifacts);
    q.detail = clamp01(detail);
    q.score = (q.blur + q.exposure + q.artifacts + q.detail) / 4.0;
    return q;
}

ImageQuality analyze_image(const GrayImage& image, const ImageConfig& config) {
    if (image.width <= 0 || image.height <= 0 || image.pixels.empty()) {
        throw Error(ErrorCode::EmptyImage, "zero-size raster");
    }
    if (image.size() < kMinPixels) {
        throw Error(ErrorCode::EmptyImage, "raster has fewer than 64 pixels");
    }
    if (image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
        throw Error(ErrorCode::UnsupportedFormat, "pixel buffer does not match dimensions");
    }

    const InteriorStats interior = interior_stats(image, config.detail_threshold);
    const double blur = interior.laplacian_variance / config.laplacian_var_ref;
    const double exposure = exposure_score(image, config.clip_margin);
    const double excess = std::max(0.0, blockiness_ratio(image) - 1.0);
    const double artifacts = 1.0 - std::min(1.0, excess / config.artifact_ratio_ref);
    const double detail = interior.edge_density / config.detail_density_ref;
    return make_image_quality(std::min(1.0, blur), exposure, artifacts, std::min(1.0, detail));
}

}  // namespace inar
