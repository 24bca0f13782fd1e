#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsgaudit/types.hpp"

namespace tsgaudit {

struct ClusterSpec {
  double weight = 1.0;
  NormalizedMoment center;
  double spread_s = 0.05;
  double spread_e = 0.05;
};

struct SynthConfig {
  std::vector<ClusterSpec> clusters;
  std::size_t videos = 1000;
  std::size_t samples_per_video = 1;
  std::pair<double, double> duration_range = {20.0, 40.0};
  std::uint64_t seed = 0;
  std::vector<std::string> vocabulary = {"opens a door", "cooks some food", "drinks from a cup"};

  /// Throws ConfigError on bad weights, centers, spreads or ranges.
  void validate() const;
};

/// Generated samples whose cluster of origin is kept for test oracles.
struct SynthDataset {
  Dataset dataset;
  std::vector<std::size_t> cluster_of;
};

/// Per sample: pick a cluster by weight, draw (s, e) around its center,
/// clamp into [0,1] and order, scale by a uniform duration. Degenerate draws
/// are redrawn; after 16 tries the moment is widened to a 1e-3 minimum.
SynthDataset generate_with_clusters(const SynthConfig& config);
Dataset generate(const SynthConfig& config);

/// Named presets: `strip` (Charades-like band of short moments starting
/// early), `three-corner` (ActivityNet-like start, end and whole-video
/// corners) and `two-cluster` (dominant short-early cluster plus a sparse
/// late minority).
SynthConfig preset(const std::string& name, std::uint64_t seed);
std::vector<std::string> preset_names();

}  // namespace tsgaudit
