#include "tsgaudit/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "tsgaudit/random.hpp"

namespace tsgaudit {

std::string_view to_string(BaselineConfig::Kind kind) {
  return kind == BaselineConfig::Kind::bias_based ? "bias_based" : "predict_all";
}

BaselineConfig::Kind parse_baseline_kind(std::string_view name) {
  if (name == "bias_based") return BaselineConfig::Kind::bias_based;
  if (name == "predict_all") return BaselineConfig::Kind::predict_all;
  throw ConfigError("baseline kind must be `bias_based` or `predict_all`");
}

PredictionSet bias_based_predict(const KdeModel& model, const Dataset& split, const BaselineConfig& config) {
  if (config.top_n < 1) throw ConfigError("top_n must be at least 1");
  PredictionSet out;
  const auto count = static_cast<std::size_t>(config.top_n);
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& sample = split.samples[i];
    const auto draws = sample_from(model, Rng::derive(config.seed, i), count);
    const auto density = model.density_at(draws);

    std::vector<std::size_t> order(draws.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return density[a] > density[b]; });

    std::vector<Moment> ranked;
    ranked.reserve(count);
    for (auto k : order) {
      const double start = std::clamp(draws[k].s * sample.duration, 0.0, sample.duration);
      const double end = std::clamp(draws[k].e * sample.duration, start, sample.duration);
      ranked.push_back({start, end});
    }
    out.add(sample.sample_id, std::move(ranked));
  }
  return out;
}

PredictionSet predict_all(const Dataset& split, int top_n) {
  if (top_n < 1) throw ConfigError("top_n must be at least 1");
  PredictionSet out;
  for (const auto& sample : split.samples)
    out.add(sample.sample_id, std::vector<Moment>(static_cast<std::size_t>(top_n), {0.0, sample.duration}));
  return out;
}

}  // namespace tsgaudit
