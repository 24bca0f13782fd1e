#include "tsgaudit/synth.hpp"

#include <algorithm>
#include <cmath>

#include "tsgaudit/random.hpp"

namespace tsgaudit {
namespace {

constexpr int kRedraws = 16;
constexpr double kMinLength = 1e-3;

const std::vector<std::string> kVocabulary = {
    "opens a door",        "closes the door",      "cooks some food",      "drinks from a cup",
    "eats a sandwich",     "sits on a chair",      "holds a phone",        "takes a towel",
    "puts a bag down",     "walks through a room", "washes the dishes",    "turns on the light",
    "plays the guitar",    "throws a ball",        "pours some water",     "laughs at the camera",
    "runs across a field", "watches the television", "reads a letter",     "cleans the table"};

std::size_t pick_cluster(const SynthConfig& config, Rng& rng) {
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t k = 0; k < config.clusters.size(); ++k) {
    acc += config.clusters[k].weight;
    if (u < acc) return k;
  }
  return config.clusters.size() - 1;
}

NormalizedMoment draw_moment(const ClusterSpec& c, Rng& rng) {
  NormalizedMoment m;
  for (int attempt = 0; attempt < kRedraws; ++attempt) {
    m.s = std::clamp(rng.normal(c.center.s, c.spread_s), 0.0, 1.0);
    m.e = std::clamp(rng.normal(c.center.e, c.spread_e), 0.0, 1.0);
    if (m.s > m.e) std::swap(m.s, m.e);
    if (m.e - m.s >= kMinLength) return m;
  }
  if (m.s + kMinLength <= 1.0)
    m.e = m.s + kMinLength;
  else
    m.s = m.e - kMinLength;
  return m;
}

}  // namespace

void SynthConfig::validate() const {
  if (clusters.empty()) throw ConfigError("synth needs at least one cluster");
  double total = 0.0;
  for (const auto& c : clusters) {
    if (!(c.weight > 0.0)) throw ConfigError("cluster weights must be positive");
    if (!(0.0 <= c.center.s && c.center.s <= c.center.e && c.center.e <= 1.0))
      throw ConfigError("cluster centers must satisfy 0 <= s <= e <= 1");
    if (!(c.spread_s > 0.0) || !(c.spread_e > 0.0)) throw ConfigError("cluster spreads must be positive");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("cluster weights must sum to 1");
  if (videos == 0 || samples_per_video == 0) throw ConfigError("videos and samples_per_video must be positive");
  if (!(duration_range.first > 0.0) || duration_range.second < duration_range.first)
    throw ConfigError("duration range must be positive and ordered");
  if (vocabulary.empty()) throw ConfigError("vocabulary must be nonempty");
}

SynthDataset generate_with_clusters(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthDataset out;
  out.dataset.name = "synthetic";
  out.dataset.samples.reserve(config.videos * config.samples_per_video);
  for (std::size_t v = 0; v < config.videos; ++v) {
    const std::string video = "synth_v" + std::to_string(v);
    const double duration = rng.uniform(config.duration_range.first, config.duration_range.second);
    for (std::size_t k = 0; k < config.samples_per_video; ++k) {
      const auto cluster = pick_cluster(config, rng);
      const auto m = draw_moment(config.clusters[cluster], rng);
      const auto& phrase = config.vocabulary[rng.below(config.vocabulary.size())];
      Sample s{video + "#" + std::to_string(k), video, duration, m.s * duration,
               std::min(m.e * duration, duration), "a person " + phrase + "."};
      out.dataset.samples.push_back(std::move(s));
      out.cluster_of.push_back(cluster);
    }
  }
  return out;
}

Dataset generate(const SynthConfig& config) { return generate_with_clusters(config).dataset; }

std::vector<std::string> preset_names() { return {"strip", "three-corner", "two-cluster"}; }

SynthConfig preset(const std::string& name, std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.vocabulary = kVocabulary;
  if (name == "strip") {
    config.clusters = {{0.55, {0.00, 0.30}, 0.04, 0.06},
                       {0.20, {0.15, 0.45}, 0.05, 0.06},
                       {0.15, {0.35, 0.65}, 0.06, 0.06},
                       {0.10, {0.60, 0.90}, 0.06, 0.06}};
    config.videos = 1200;
    config.samples_per_video = 3;
    config.duration_range = {20.0, 40.0};
  } else if (name == "three-corner") {
    config.clusters = {{0.30, {0.00, 1.00}, 0.03, 0.03},
                       {0.30, {0.00, 0.30}, 0.03, 0.08},
                       {0.25, {0.70, 1.00}, 0.08, 0.03},
                       {0.15, {0.35, 0.60}, 0.10, 0.10}};
    config.videos = 800;
    config.samples_per_video = 4;
    config.duration_range = {60.0, 240.0};
  } else if (name == "two-cluster") {
    config.clusters = {{0.80, {0.05, 0.30}, 0.02, 0.02}, {0.20, {0.60, 0.75}, 0.06, 0.06}};
    config.videos = 2000;
    config.samples_per_video = 1;
    config.duration_range = {20.0, 40.0};
  } else {
    throw ConfigError("unknown preset `" + name + "`");
  }
  return config;
}

}  // namespace tsgaudit
