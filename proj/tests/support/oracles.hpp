#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library under test except for plain data types.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "inar/features.hpp"

namespace oracle {

inline std::filesystem::path fixture(const std::string& name) {
    return std::filesystem::path(INAR_FIXTURE_DIR) / name;
}

inline std::filesystem::path config_file(const std::string& name) {
    return std::filesystem::path(INAR_CONFIG_DIR) / name;
}

// Quality predictor written out term by term.
struct QualityTerms {
    double a_m = 0.0;
    double delta_prec = 0.0;
    double res_coeff = 0.07;
    double r = 336.0;
    double r_cal = 336.0;
    double kappa = 1.0;
    std::array<double, 3> gaps{};
    double d = 0.0;
    double lambda = 0.0;
    double s_detail = 0.0;
    double r_ref = 336.0;
};

inline double quality(const QualityTerms& t) {
    double penalty = 0.0;
    for (double g : t.gaps) penalty += g * g;
    const double detail_res = -t.lambda * t.s_detail * std::max(0.0, (t.r_ref - t.r) / t.r_ref);
    return t.a_m + t.delta_prec + t.res_coeff * (std::log2(t.r) - std::log2(t.r_cal)) - t.kappa * penalty -
           t.d * (1.0 - t.a_m) + detail_res;
}

// Cost estimator: latency + weighted energy + network.
inline double edge_cost(double base_latency, double params_b, double f_prec, double r) {
    const double scale = (r / 336.0) * (r / 336.0);
    return base_latency * f_prec * scale + 0.3 * (params_b * f_prec);
}

inline double cloud_cost(double base_latency, double f_prec, double r, double bw) {
    const double scale = (r / 336.0) * (r / 336.0);
    return base_latency * f_prec * scale + 0.3 * 0.1 + 0.5 * scale * 100.0 / std::max(bw, 10.0);
}

// Brute-force skyline over (cost, quality): a point survives unless another
// point has cost <= and quality >= with at least one strict. Exact duplicates
// collapse to one.
using Point = std::pair<double, double>;

inline std::set<Point> skyline(const std::vector<Point>& points) {
    std::set<Point> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < points.size() && !dominated; ++j) {
            if (i == j) continue;
            const auto& [cj, qj] = points[j];
            const auto& [ci, qi] = points[i];
            dominated = cj <= ci && qj >= qi && (cj < ci || qj > qi);
        }
        if (!dominated) out.insert(points[i]);
    }
    return out;
}

// Separable Gaussian blur with clamped borders.
inline inar::GrayImage gaussian_blur(const inar::GrayImage& src, double sigma) {
    if (sigma <= 0.0) return src;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        total += kernel[i + radius];
    }
    for (double& k : kernel) k /= total;
    const int w = src.width;
    const int h = src.height;
    std::vector<double> tmp(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) acc += kernel[i + radius] * src.at(std::clamp(x + i, 0, w - 1), y);
            tmp[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    inar::GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
            }
            out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
        }
    }
    return out;
}

// 8x8 DCT-II, uniform coefficient quantization with `step`, inverse DCT.
// The same mechanism that produces JPEG blocking.
inline inar::GrayImage dct_quantize(const inar::GrayImage& src, double step) {
    constexpr int N = 8;
    double basis[N][N];
    for (int k = 0; k < N; ++k) {
        const double scale = k == 0 ? std::sqrt(1.0 / N) : std::sqrt(2.0 / N);
        for (int n = 0; n < N; ++n) basis[k][n] = scale * std::cos(std::numbers::pi * (n + 0.5) * k / N);
    }
    inar::GrayImage out = src;
    for (int by = 0; by + N <= src.height; by += N) {
        for (int bx = 0; bx + N <= src.width; bx += N) {
            double block[N][N];
            double coef[N][N];
            for (int y = 0; y < N; ++y)
                for (int x = 0; x < N; ++x) block[y][x] = src.at(bx + x, by + y) - 128.0;
            for (int u = 0; u < N; ++u) {
                for (int v = 0; v < N; ++v) {
                    double acc = 0.0;
                    for (int y = 0; y < N; ++y)
                        for (int x = 0; x < N; ++x) acc += basis[u][y] * basis[v][x] * block[y][x];
                    coef[u][v] = step > 0.0 ? std::round(acc / step) * step : acc;
                }
            }
            for (int y = 0; y < N; ++y) {
                for (int x = 0; x < N; ++x) {
                    double acc = 0.0;
                    for (int u = 0; u < N; ++u)
                        for (int v = 0; v < N; ++v) acc += basis[u][y] * basis[v][x] * coef[u][v];
                    out.at(bx + x, by + y) = static_cast<std::uint8_t>(std::clamp(std::lround(acc + 128.0), 0L, 255L));
                }
            }
        }
    }
    return out;
}

// A textured test scene: smooth shading, a few hard-edged shapes and some
// seeded grain, so every estimator has something to measure.
inline inar::GrayImage scene(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> grain(-12, 12);
    inar::GrayImage img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double v = 70.0 + 90.0 * (x + y) / static_cast<double>(w + h);
            if ((x / 11 + y / 7) % 5 == 0) v += 60.0;
            const double cx = x - w * 0.6;
            const double cy = y - h * 0.4;
            if (cx * cx + cy * cy < (w * 0.15) * (w * 0.15)) v = 220.0;
            if (x > w / 5 && x < w / 3 && y > h / 2) v = 30.0;
            v += grain(rng);
            img.at(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
    return img;
}

// Whitespace/punctuation tokenization and lexicon hit count, written without
// the library's tokenizer.
inline int lexicon_hits(std::string_view text, const std::vector<std::string>& lexicon) {
    int hits = 0;
    std::string word;
    auto flush = [&] {
        if (!word.empty() && std::find(lexicon.begin(), lexicon.end(), word) != lexicon.end()) ++hits;
        word.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return hits;
}

inline const std::vector<std::string> kReasoningLexicon{"why", "how", "because", "compare",
                                                        "than", "if",  "difference", "explain"};
inline const std::vector<std::string> kContextLexicon{"this", "that", "these", "those",
                                                      "left", "right", "one", "other"};

// Area above idle of a linear ramp from p0 to p1 watts over `ms`, in joules.
inline double ramp_energy(double p0, double p1, double idle, double ms) {
    const double a = p0 - idle;
    const double b = p1 - idle;
    const double s = ms / 1000.0;
    if (a >= 0.0 && b >= 0.0) return 0.5 * (a + b) * s;
    if (a <= 0.0 && b <= 0.0) return 0.0;
    // One crossing: a triangle on the positive side.
    const double pos = std::max(a, b);
    const double frac = pos / (std::abs(a) + std::abs(b));
    return 0.5 * pos * frac * s;
}

// Lower-order-statistic percentile.
inline double percentile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const auto idx = static_cast<std::size_t>(std::floor(p * static_cast<double>(v.size() - 1)));
    return v[idx];
}

}  // namespace oracle
