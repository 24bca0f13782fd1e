#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsgaudit/types.hpp"

namespace tsgaudit {

/// Per-dimension Gaussian standard deviations in normalized units.
struct Bandwidth {
  double s = 0.0;
  double e = 0.0;
};

/// Lower bound applied to rule-of-thumb bandwidths. Guards dimensions with
/// zero spread (e.g. every moment starting at 0).
inline constexpr double kBandwidthFloor = 1e-3;

struct BandwidthPolicy {
  enum class Kind { scott, silverman, fixed };

  Kind kind = Kind::scott;
  Bandwidth fixed_value{};

  static BandwidthPolicy scott() { return {}; }
  static BandwidthPolicy silverman() { return {Kind::silverman, {}}; }
  /// Throws ConfigError unless both components are positive and finite.
  static BandwidthPolicy explicit_bandwidth(double hs, double he);

  /// Accepts `scott`, `silverman` or `<hs>,<he>`.
  static BandwidthPolicy parse(const std::string& text);
  std::string to_string() const;
};

/// Product-Gaussian kernel density estimate over normalized moments:
///   f(x) = 1/N sum_i N(x_s - p_s,i; h_s) N(x_e - p_e,i; h_e)
/// Kernel support is all of R^2, so some mass leaks outside the unit square.
/// Immutable once fitted; evaluation is safe from any number of threads.
class KdeModel {
 public:
  /// Throws ConfigError on empty input or invalid moments.
  static KdeModel fit(std::span<const NormalizedMoment> moments,
                      const BandwidthPolicy& policy = BandwidthPolicy::scott());

  double density_at(NormalizedMoment point) const;

  /// Batch evaluation; out.size() must equal points.size(). Each query is
  /// summed independently, so the result does not depend on `threads`.
  void density_at(std::span<const NormalizedMoment> points, std::span<double> out,
                  unsigned threads = 1) const;
  std::vector<double> density_at(std::span<const NormalizedMoment> points,
                                 unsigned threads = 1) const;

  std::size_t size() const { return ps_.size(); }
  const Bandwidth& bandwidth() const { return bandwidth_; }
  NormalizedMoment point(std::size_t i) const { return {ps_[i], pe_[i]}; }

 private:
  KdeModel() = default;

  std::vector<double> ps_;
  std::vector<double> pe_;
  Bandwidth bandwidth_;
  double norm_ = 0.0;  // 1 / (N 2 pi h_s h_e)
};

/// Unbiased per-dimension standard deviations of the moments.
std::pair<double, double> moment_stddev(std::span<const NormalizedMoment> moments);

/// Scott's rule in 2D, h = sigma N^(-1/6), floored at kBandwidthFloor.
Bandwidth scott_bandwidth(std::span<const NormalizedMoment> moments);
/// Silverman's rule, h = sigma (4 / ((d + 2) N))^(1/(d + 4)), floored.
Bandwidth silverman_bandwidth(std::span<const NormalizedMoment> moments);

/// Densities at the cell centers of an R x R tiling of [0,1]^2.
/// values[i * R + j] is the density at (s = axis[i], e = axis[j]).
struct DensityGrid {
  int resolution = 0;
  std::vector<double> axis;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * resolution + j]; }
  double cell_area() const { return 1.0 / (static_cast<double>(resolution) * resolution); }
  /// Midpoint-rule estimate of the model mass inside the unit square.
  double mass() const;
  /// (i, j) of the largest value; first in row-major order on ties.
  std::pair<int, int> argmax() const;
};

/// Throws ConfigError when resolution < 2.
DensityGrid density_grid(const KdeModel& model, int resolution, unsigned threads = 1);

/// Smoothed-bootstrap draws: pick a support point uniformly, add Gaussian
/// noise with the model bandwidth, retry the noise up to 16 times until
/// 0 <= s <= e <= 1, then clamp into [0,1] and order as a last resort.
std::vector<NormalizedMoment> sample_from(const KdeModel& model, std::uint64_t seed,
                                          std::size_t count);

inline constexpr int kSampleRetries = 16;

}  // namespace tsgaudit
