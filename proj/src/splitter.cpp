#include "tsgaudit/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "tsgaudit/ingest.hpp"
#include "tsgaudit/random.hpp"

namespace tsgaudit {
namespace {

// Videos in order of first appearance, each with its sample indices.
struct VideoGroups {
  std::vector<std::string> ids;
  std::vector<std::vector<std::size_t>> members;
};

VideoGroups group_by_video(const Dataset& dataset) {
  VideoGroups groups;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& video = dataset.samples[i].video_id;
    auto [it, inserted] = slot.try_emplace(video, groups.ids.size());
    if (inserted) {
      groups.ids.push_back(video);
      groups.members.emplace_back();
    }
    groups.members[it->second].push_back(i);
  }
  return groups;
}

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

std::string_view to_string(SplitLabel label) {
  switch (label) {
    case SplitLabel::training: return "training";
    case SplitLabel::val: return "val";
    case SplitLabel::test_iid: return "test_iid";
    case SplitLabel::test_ood: return "test_ood";
  }
  return "unknown";
}

SplitLabel parse_split_label(std::string_view name) {
  for (auto label : kAllSplits)
    if (to_string(label) == name) return label;
  throw ConfigError("unknown split `" + std::string(name) + "`");
}

SplitConfig SplitConfig::charades(std::uint64_t seed) {
  SplitConfig config;
  config.seed = seed;
  return config;
}

SplitConfig SplitConfig::activitynet(std::uint64_t seed) {
  SplitConfig config;
  config.seed = seed;
  config.overlong_threshold = 0.5;
  return config;
}

void SplitConfig::validate() const {
  if (!in_open_unit(ood_fraction)) throw ConfigError("ood_fraction must be in (0,1)");
  for (double r : ratios)
    if (!in_open_unit(r)) throw ConfigError("split ratios must be in (0,1)");
  const double total = ood_fraction + ratios[0] + ratios[1] + ratios[2];
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("ood_fraction plus ratios must sum to 1");
  if (overlong_threshold && !in_open_unit(*overlong_threshold))
    throw ConfigError("overlong threshold must be in (0,1)");
}

std::size_t SplitResult::count(SplitLabel label) const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

std::vector<std::size_t> SplitResult::indices_of(SplitLabel label) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) out.push_back(i);
  return out;
}

std::vector<std::size_t> rank_by_density(const std::vector<double>& densities) {
  std::vector<std::size_t> order(densities.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return densities[a] > densities[b]; });
  return order;
}

std::vector<std::size_t> rank_by_density(const Dataset& dataset, const KdeModel& model,
                                         unsigned threads) {
  if (model.size() != dataset.size())
    throw ConfigError("density model has " + std::to_string(model.size()) + " points but dataset has " +
                      std::to_string(dataset.size()) + " samples");
  const auto moments = normalize_all(dataset);
  return rank_by_density(model.density_at(moments, threads));
}

std::vector<Side> preliminary_split(const std::vector<std::size_t>& ranked, double ood_fraction) {
  const std::size_t n = ranked.size();
  // The epsilon keeps exact products like 0.2 * 10 from flooring to 1.
  const auto cut = std::min(n, static_cast<std::size_t>(std::floor(ood_fraction * n + 1e-9)));
  std::vector<Side> sides(n, Side::train);
  for (std::size_t r = n - cut; r < n; ++r) sides[ranked[r]] = Side::ood;
  return sides;
}

ConflictResolution resolve_conflicts(const Dataset& dataset, std::vector<Side> sides,
                                     std::optional<double> overlong_threshold) {
  if (sides.size() != dataset.size()) throw ConfigError("side assignment does not cover the dataset");
  ConflictResolution out;
  const auto groups = group_by_video(dataset);

  std::vector<bool> pinned(groups.ids.size(), false);
  if (overlong_threshold) {
    for (std::size_t v = 0; v < groups.ids.size(); ++v) {
      const auto& members = groups.members[v];
      pinned[v] = std::any_of(members.begin(), members.end(), [&](std::size_t i) {
        return normalize(dataset.samples[i]).length() > *overlong_threshold;
      });
      if (!pinned[v]) continue;
      for (auto i : members) {
        if (sides[i] == Side::ood) {
          sides[i] = Side::train;
          ++out.overlong_pinned;
        }
      }
    }
  }

  for (std::size_t v = 0; v < groups.ids.size(); ++v) {
    if (pinned[v]) continue;
    const auto& members = groups.members[v];
    const auto ood = static_cast<std::size_t>(
        std::count_if(members.begin(), members.end(), [&](std::size_t i) { return sides[i] == Side::ood; }));
    const std::size_t train = members.size() - ood;
    if (ood == 0 || train == 0) continue;
    const Side target = ood > train ? Side::ood : Side::train;
    out.conflict_moved += target == Side::ood ? train : ood;
    for (auto i : members) sides[i] = target;
  }
  out.sides = std::move(sides);
  return out;
}

std::vector<SplitLabel> finalize_splits(const Dataset& dataset, const std::vector<Side>& sides,
                                        const std::array<double, 3>& ratios, std::uint64_t seed,
                                        std::optional<double> overlong_threshold) {
  if (sides.size() != dataset.size()) throw ConfigError("side assignment does not cover the dataset");
  const auto groups = group_by_video(dataset);

  std::vector<std::size_t> pool;
  std::size_t pool_samples = 0;
  std::size_t pinned_videos = 0;
  std::vector<SplitLabel> labels(dataset.size(), SplitLabel::training);
  for (std::size_t v = 0; v < groups.ids.size(); ++v) {
    const auto& members = groups.members[v];
    const bool ood = sides[members.front()] == Side::ood;
    for (auto i : members) {
      if ((sides[i] == Side::ood) != ood)
        throw ConfigError("video " + groups.ids[v] + " spans both sides; resolve conflicts first");
      if (ood) labels[i] = SplitLabel::test_ood;
    }
    if (ood) continue;
    pool_samples += members.size();
    const bool pinned = overlong_threshold && std::any_of(members.begin(), members.end(), [&](std::size_t i) {
                          return normalize(dataset.samples[i]).length() > *overlong_threshold;
                        });
    if (pinned)
      ++pinned_videos;
    else
      pool.push_back(v);
  }
  // Pinned videos already populate training.
  const std::size_t training_reserve = pinned_videos > 0 ? 0 : 1;
  if (pool.size() < 2 + training_reserve)
    throw ConfigError("training pool has " + std::to_string(pool.size() + pinned_videos) +
                      " video(s); need at least 3 to populate training, val and test_iid");

  Rng rng(seed);
  shuffle(pool, rng);

  const double ratio_total = ratios[0] + ratios[1] + ratios[2];
  const std::array<SplitLabel, 2> held_out = {SplitLabel::val, SplitLabel::test_iid};
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < held_out.size(); ++k) {
    const double target = static_cast<double>(pool_samples) * ratios[k + 1] / ratio_total;
    double filled = 0.0;
    // Splits still to be filled after this one, counting training.
    const std::size_t reserve = held_out.size() - k - 1 + training_reserve;
    // Always take one video, then keep adding while that moves the count
    // closer to the target.
    while (cursor + 1 + reserve <= pool.size()) {
      const auto size = static_cast<double>(groups.members[pool[cursor]].size());
      if (filled > 0.0 && std::abs(filled + size - target) >= std::abs(filled - target)) break;
      for (auto i : groups.members[pool[cursor]]) labels[i] = held_out[k];
      filled += size;
      ++cursor;
    }
  }
  return labels;
}

SplitResult resplit(const Dataset& dataset, const SplitConfig& config, unsigned threads) {
  if (dataset.empty()) throw ConfigError("cannot split an empty dataset");
  config.validate();

  const auto moments = normalize_all(dataset);
  const auto model = KdeModel::fit(moments, config.bandwidth);
  const auto ranked = rank_by_density(model.density_at(moments, threads));
  auto resolved = resolve_conflicts(dataset, preliminary_split(ranked, config.ood_fraction),
                                    config.overlong_threshold);

  SplitResult result;
  result.labels =
      finalize_splits(dataset, resolved.sides, config.ratios, config.seed, config.overlong_threshold);
  result.sample_ids.reserve(dataset.size());
  for (const auto& s : dataset.samples) result.sample_ids.push_back(s.sample_id);

  auto& m = result.manifest;
  m.seed = config.seed;
  m.bandwidth = model.bandwidth();
  m.config = config;
  m.conflict_moved = resolved.conflict_moved;
  m.overlong_pinned = resolved.overlong_pinned;
  std::array<std::unordered_set<std::string>, 4> videos;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto slot = static_cast<std::size_t>(result.labels[i]);
    ++m.sample_counts[slot];
    videos[slot].insert(dataset.samples[i].video_id);
  }
  for (std::size_t k = 0; k < 4; ++k) m.video_counts[k] = videos[k].size();

  validate_split(dataset, result);
  return result;
}

void validate_split(const Dataset& dataset, const SplitResult& result) {
  if (result.labels.size() != dataset.size() || result.sample_ids.size() != dataset.size())
    throw StructureError("split does not cover every sample");
  std::unordered_map<std::string, SplitLabel> video_label;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& sample = dataset.samples[i];
    if (result.sample_ids[i] != sample.sample_id)
      throw StructureError("split sample order differs from dataset at " + sample.sample_id);
    const auto [it, inserted] = video_label.try_emplace(sample.video_id, result.labels[i]);
    if (!inserted && it->second != result.labels[i])
      throw StructureError("video " + sample.video_id + " appears in both " +
                           std::string(to_string(it->second)) + " and " +
                           std::string(to_string(result.labels[i])));
  }
}

}  // namespace tsgaudit
