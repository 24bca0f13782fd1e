#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tsgaudit/density.hpp"
#include "tsgaudit/types.hpp"

namespace tsgaudit {

enum class SplitLabel { training = 0, val = 1, test_iid = 2, test_ood = 3 };

inline constexpr std::array<SplitLabel, 4> kAllSplits = {SplitLabel::training, SplitLabel::val,
                                                         SplitLabel::test_iid, SplitLabel::test_ood};

std::string_view to_string(SplitLabel label);
SplitLabel parse_split_label(std::string_view name);

struct SplitConfig {
  double ood_fraction = 0.20;
  /// Shares of the whole dataset for training, val and test_iid.
  std::array<double, 3> ratios = {0.70, 0.05, 0.05};
  /// Samples whose normalized length exceeds this are pinned to training.
  std::optional<double> overlong_threshold;
  std::uint64_t seed = 0;
  BandwidthPolicy bandwidth = BandwidthPolicy::scott();

  /// Charades mode: no overlong pinning.
  static SplitConfig charades(std::uint64_t seed);
  /// ActivityNet mode: pin moments longer than half the video.
  static SplitConfig activitynet(std::uint64_t seed);

  /// Throws ConfigError unless every fraction is in (0,1) and they sum to 1.
  void validate() const;
};

struct SplitManifest {
  std::uint64_t seed = 0;
  Bandwidth bandwidth;
  SplitConfig config;
  std::array<std::size_t, 4> sample_counts{};
  std::array<std::size_t, 4> video_counts{};
  std::size_t conflict_moved = 0;
  std::size_t overlong_pinned = 0;
};

/// labels[i] is the split of dataset sample i.
struct SplitResult {
  std::vector<std::string> sample_ids;
  std::vector<SplitLabel> labels;
  SplitManifest manifest;

  std::size_t count(SplitLabel label) const;
  std::vector<std::size_t> indices_of(SplitLabel label) const;
};

/// Side of the preliminary cut.
enum class Side : std::uint8_t { train, ood };

/// Sample indices by descending density; equal densities keep ingestion
/// order. Throws ConfigError if the model was not fitted on this dataset.
std::vector<std::size_t> rank_by_density(const std::vector<double>& densities);
std::vector<std::size_t> rank_by_density(const Dataset& dataset, const KdeModel& model,
                                         unsigned threads = 1);

/// Marks the last floor(ood_fraction * N) ranked samples as ood.
std::vector<Side> preliminary_split(const std::vector<std::size_t>& ranked, double ood_fraction);

struct ConflictResolution {
  std::vector<Side> sides;
  std::size_t conflict_moved = 0;
  std::size_t overlong_pinned = 0;
};

/// Makes the two sides video-disjoint. With a threshold, overlong samples and
/// every video holding one go to train first; then each split video moves to
/// the side holding the strict majority of its samples, train on ties.
ConflictResolution resolve_conflicts(const Dataset& dataset, std::vector<Side> sides,
                                     std::optional<double> overlong_threshold);

/// Shuffles the train-side videos and fills val, then test_iid, greedily
/// toward ratio-scaled sample targets; the rest is training. Videos holding
/// a sample longer than `overlong_threshold` never leave training. Ood
/// samples get test_ood. Throws ConfigError with fewer than 3 pool videos.
std::vector<SplitLabel> finalize_splits(const Dataset& dataset, const std::vector<Side>& sides,
                                        const std::array<double, 3>& ratios, std::uint64_t seed,
                                        std::optional<double> overlong_threshold = std::nullopt);

/// Full pipeline: normalize, fit, rank, cut, resolve conflicts, finalize.
SplitResult resplit(const Dataset& dataset, const SplitConfig& config, unsigned threads = 1);

/// Throws StructureError unless result covers every sample exactly once and
/// no video spans two splits.
void validate_split(const Dataset& dataset, const SplitResult& result);

}  // namespace tsgaudit
