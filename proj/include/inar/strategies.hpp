#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "inar/calibration.hpp"
#include "inar/features.hpp"
#include "inar/model_pool.hpp"
#include "inar/router.hpp"

namespace inar {

enum class StrategyKind { EdgeOnly, CloudOnly, InarVl, TextOnly, ImageOnly, Static, Oracle };

/// CLI spelling: edge, cloud, inar, text, image, static, oracle.
const char* to_string(StrategyKind k) noexcept;
/// Row label used in reports (Edge-Only, INAR-VL, ...).
const char* display_name(StrategyKind k) noexcept;
StrategyKind parse_strategy(std::string_view name);

inline constexpr StrategyKind kAllStrategies[] = {StrategyKind::EdgeOnly, StrategyKind::CloudOnly,
                                                  StrategyKind::InarVl,   StrategyKind::TextOnly,
                                                  StrategyKind::ImageOnly, StrategyKind::Static,
                                                  StrategyKind::Oracle};

struct Strategy {
    StrategyKind kind = StrategyKind::InarVl;
    /// Static pair (only read for StrategyKind::Static).
    std::string static_edge = "qwen3-vl-2b";
    std::string static_cloud = "qwen3-vl-8b";
};

/// Applies the strategy's feature mask. TextOnly drops every image-derived
/// signal (w_img = 0, blur and detail needs zeroed); ImageOnly drops every
/// text-derived signal (w_txt = 0, reasoning need zeroed).
RequestDescriptor mask_descriptor(const RequestDescriptor& descriptor, StrategyKind kind);

/// The pool a strategy routes over (Static keeps its two-model pair).
PoolConfig strategy_pool(const Strategy& strategy, const PoolConfig& pool);

/// Routing decision for every kind except Oracle (throws MissingOutcome:
/// the oracle needs hindsight outcomes, see oracle_select).
RoutingDecision select(const Strategy& strategy, const RequestDescriptor& descriptor, const PoolConfig& pool,
                       const NetworkState& network, const RouterParams& params);

struct ModelScore {
    std::string model_id;
    double score = 0.0;
};

/// Hindsight best-of-pool: highest score, ties to edge then model id. Throws
/// MissingOutcome unless every pool model has a score.
ModelScore oracle_select(std::span<const ModelScore> outcomes, const PoolConfig& pool);

}  // namespace inar
