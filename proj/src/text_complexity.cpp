#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <unordered_map>

#include "inar/error.hpp"
#include "inar/features.hpp"

namespace inar {

namespace {

constexpr const char* kFrequentWords[] = {
#include "lexicon_words.inc"
};
constexpr std::size_t kFrequentWordCount = std::size(kFrequentWords);

constexpr double kLengthTokens = 32.0;
constexpr double kEntityGain = 4.0;
constexpr double kMarkerHits = 2.0;

constexpr std::string_view kReasoningMarkers[] = {"why", "how", "because", "compare", "than", "if", "difference", "explain"};
constexpr std::string_view kContextMarkers[] = {"this", "that", "these", "those", "left", "right", "one", "other"};

const std::unordered_map<std::string_view, std::size_t>& frequency_ranks() {
    static const auto ranks = [] {
        std::unordered_map<std::string_view, std::size_t> m;
        m.reserve(kFrequentWordCount);
        for (std::size_t i = 0; i < kFrequentWordCount; ++i) m.emplace(kFrequentWords[i], i);
        return m;
    }();
    return ranks;
}

bool is_token_char(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

struct RawToken {
    std::string original;
    std::string lower;
};

std::vector<RawToken> split(std::string_view text) {
    std::vector<RawToken> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_token_char(static_cast<unsigned char>(text[i]))) ++i;
        const std::size_t start = i;
        while (i < text.size() && is_token_char(static_cast<unsigned char>(text[i]))) ++i;
        if (i > start) {
            RawToken t;
            t.original.assign(text.substr(start, i - start));
            t.lower = t.original;
            for (char& c : t.lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.push_back(std::move(t));
        }
    }
    return out;
}

template <std::size_t N>
std::size_t count_hits(const std::vector<RawToken>& tokens, const std::string_view (&lexicon)[N]) {
    std::size_t hits = 0;
    for (const auto& t : tokens) {
        if (std::find(std::begin(lexicon), std::end(lexicon), t.lower) != std::end(lexicon)) ++hits;
    }
    return hits;
}

double question_type_score(std::string_view first) {
    if (first == "what" || first == "which") return 0.3;
    if (first == "where" || first == "when" || first == "who") return 0.4;
    if (first == "how") return 0.7;
    if (first == "why") return 0.9;
    return 0.5;
}

}  // namespace

const char* to_string(TextAxis a) noexcept {
    switch (a) {
        case TextAxis::Length: return "length";
        case TextAxis::EntityDensity: return "entity_density";
        case TextAxis::QuestionType: return "question_type";
        case TextAxis::Vocabulary: return "vocabulary";
        case TextAxis::Reasoning: return "reasoning";
        case TextAxis::Context: return "context";
    }
    return "?";
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (auto& t : split(text)) out.push_back(std::move(t.lower));
    return out;
}

double word_rarity(std::string_view lower_word) {
    const auto& ranks = frequency_ranks();
    const auto it = ranks.find(lower_word);
    if (it == ranks.end()) return 1.0;
    return static_cast<double>(it->second) / static_cast<double>(kFrequentWordCount);
}

TextAxes text_axes(std::string_view question) {
    TextAxes axes{};
    const auto tokens = split(question);
    if (tokens.empty()) return axes;

    const double n = static_cast<double>(tokens.size());
    std::size_t entities = 0;
    double rarity = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto& t = tokens[i];
        const bool has_digit =
            std::any_of(t.original.begin(), t.original.end(), [](unsigned char c) { return std::isdigit(c); });
        const bool capitalized = i > 0 && std::isupper(static_cast<unsigned char>(t.original.front()));
        if (has_digit || capitalized) ++entities;
        rarity += word_rarity(t.lower);
    }

    axes[static_cast<std::size_t>(TextAxis::Length)] = std::min(1.0, n / kLengthTokens);
    axes[static_cast<std::size_t>(TextAxis::EntityDensity)] = std::min(1.0, static_cast<double>(entities) / n * kEntityGain);
    axes[static_cast<std::size_t>(TextAxis::QuestionType)] = question_type_score(tokens.front().lower);
    axes[static_cast<std::size_t>(TextAxis::Vocabulary)] = rarity / n;
    axes[static_cast<std::size_t>(TextAxis::Reasoning)] =
        std::min(1.0, static_cast<double>(count_hits(tokens, kReasoningMarkers)) / kMarkerHits);
    axes[static_cast<std::size_t>(TextAxis::Context)] =
        std::min(1.0, static_cast<double>(count_hits(tokens, kContextMarkers)) / kMarkerHits);
    return axes;
}

TextComplexity combine_text(const TextAxes& axes, const TextWeights& beta) {
    double total = 0.0;
    for (double b : beta) {
        if (!(b >= 0.0)) throw Error(ErrorCode::BadWeights, "text weight is negative");
        total += b;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::BadWeights, "text weights must sum to 1");
    TextComplexity out;
    out.beta = beta;
    double score = 0.0;
    for (std::size_t i = 0; i < kTextAxisCount; ++i) {
        out.axes[i] = std::clamp(axes[i], 0.0, 1.0);
        score += beta[i] * out.axes[i];
    }
    out.score = std::clamp(score, 0.0, 1.0);
    return out;
}

TextComplexity analyze_text(std::string_view question, const TextWeights& beta) {
    return combine_text(text_axes(question), beta);
}

}  // namespace inar
