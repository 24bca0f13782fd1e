#pragma once

#include <cstdint>
#include <string_view>

#include "tsgaudit/density.hpp"
#include "tsgaudit/metrics.hpp"
#include "tsgaudit/types.hpp"

namespace tsgaudit {

struct BaselineConfig {
  enum class Kind { bias_based, predict_all };

  Kind kind = Kind::bias_based;
  int top_n = 5;
  std::uint64_t seed = 0;  // bias_based only
};

std::string_view to_string(BaselineConfig::Kind kind);
BaselineConfig::Kind parse_baseline_kind(std::string_view name);

/// Draws top_n locations per sample from `model` (fitted on the training
/// split only), scales them by the sample's duration and ranks them by
/// descending model density. Sample i uses the stream Rng::derive(seed, i),
/// so predictions never look at ground truth.
PredictionSet bias_based_predict(const KdeModel& model, const Dataset& split, const BaselineConfig& config);

/// top_n copies of the whole video for every sample.
PredictionSet predict_all(const Dataset& split, int top_n);

}  // namespace tsgaudit
