#include "tsgaudit/density.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "tsgaudit/kernels.hpp"
#include "tsgaudit/parallel.hpp"
#include "tsgaudit/random.hpp"

namespace tsgaudit {
namespace {

bool valid(NormalizedMoment m) { return 0.0 <= m.s && m.s <= m.e && m.e <= 1.0; }

Bandwidth rule_of_thumb(std::span<const NormalizedMoment> moments, double factor) {
  const auto [sd_s, sd_e] = moment_stddev(moments);
  return {std::max(sd_s * factor, kBandwidthFloor), std::max(sd_e * factor, kBandwidthFloor)};
}

}  // namespace

BandwidthPolicy BandwidthPolicy::explicit_bandwidth(double hs, double he) {
  if (!(hs > 0.0) || !(he > 0.0) || !std::isfinite(hs) || !std::isfinite(he))
    throw ConfigError("bandwidth components must be positive and finite");
  return {Kind::fixed, {hs, he}};
}

BandwidthPolicy BandwidthPolicy::parse(const std::string& text) {
  if (text == "scott") return scott();
  if (text == "silverman") return silverman();
  const auto comma = text.find(',');
  if (comma != std::string::npos) {
    double hs = 0.0, he = 0.0;
    const char* begin = text.data();
    const char* mid = begin + comma;
    const char* end = begin + text.size();
    const auto a = std::from_chars(begin, mid, hs);
    const auto b = std::from_chars(mid + 1, end, he);
    if (a.ec == std::errc{} && a.ptr == mid && b.ec == std::errc{} && b.ptr == end)
      return explicit_bandwidth(hs, he);
  }
  throw ConfigError("bandwidth must be `scott`, `silverman` or `<hs>,<he>`, got `" + text + "`");
}

std::string BandwidthPolicy::to_string() const {
  switch (kind) {
    case Kind::scott: return "scott";
    case Kind::silverman: return "silverman";
    case Kind::fixed: break;
  }
  std::ostringstream os;
  os.precision(17);
  os << fixed_value.s << ',' << fixed_value.e;
  return os.str();
}

std::pair<double, double> moment_stddev(std::span<const NormalizedMoment> moments) {
  const auto n = static_cast<double>(moments.size());
  if (moments.size() < 2) return {0.0, 0.0};
  double mean_s = 0.0, mean_e = 0.0;
  for (const auto& m : moments) {
    mean_s += m.s;
    mean_e += m.e;
  }
  mean_s /= n;
  mean_e /= n;
  double ss = 0.0, se = 0.0;
  for (const auto& m : moments) {
    ss += (m.s - mean_s) * (m.s - mean_s);
    se += (m.e - mean_e) * (m.e - mean_e);
  }
  return {std::sqrt(ss / (n - 1.0)), std::sqrt(se / (n - 1.0))};
}

Bandwidth scott_bandwidth(std::span<const NormalizedMoment> moments) {
  return rule_of_thumb(moments, std::pow(static_cast<double>(moments.size()), -1.0 / 6.0));
}

Bandwidth silverman_bandwidth(std::span<const NormalizedMoment> moments) {
  constexpr double d = 2.0;
  const double n = static_cast<double>(moments.size());
  return rule_of_thumb(moments, std::pow(4.0 / ((d + 2.0) * n), 1.0 / (d + 4.0)));
}

KdeModel KdeModel::fit(std::span<const NormalizedMoment> moments, const BandwidthPolicy& policy) {
  if (moments.empty()) throw ConfigError("cannot fit a density to zero moments");
  for (const auto& m : moments)
    if (!valid(m)) throw ConfigError("moment outside 0 <= s <= e <= 1");

  KdeModel model;
  switch (policy.kind) {
    case BandwidthPolicy::Kind::scott: model.bandwidth_ = scott_bandwidth(moments); break;
    case BandwidthPolicy::Kind::silverman: model.bandwidth_ = silverman_bandwidth(moments); break;
    case BandwidthPolicy::Kind::fixed:
      if (!(policy.fixed_value.s > 0.0) || !(policy.fixed_value.e > 0.0))
        throw ConfigError("explicit bandwidth must be positive");
      model.bandwidth_ = policy.fixed_value;
      break;
  }
  model.ps_.reserve(moments.size());
  model.pe_.reserve(moments.size());
  for (const auto& m : moments) {
    model.ps_.push_back(m.s);
    model.pe_.push_back(m.e);
  }
  model.norm_ = 1.0 / (static_cast<double>(moments.size()) * 2.0 * std::numbers::pi *
                       model.bandwidth_.s * model.bandwidth_.e);
  return model;
}

double KdeModel::density_at(NormalizedMoment point) const {
  double out = 0.0;
  density_at(std::span(&point, 1), std::span(&out, 1));
  return out;
}

void KdeModel::density_at(std::span<const NormalizedMoment> points, std::span<double> out,
                          unsigned threads) const {
  if (out.size() != points.size()) throw std::invalid_argument("density_at: output size mismatch");
  const double scale_s = 1.0 / (2.0 * bandwidth_.s * bandwidth_.s);
  const double scale_e = 1.0 / (2.0 * bandwidth_.e * bandwidth_.e);
  const kernels::PointView view{ps_, pe_};
  const auto kernel = kernels::resolve(kernels::active_isa());

  parallel_for(points.size(), threads, [&](std::size_t begin, std::size_t end) {
    constexpr std::size_t kBlock = 256;
    double qs[kBlock], qe[kBlock];
    for (std::size_t b = begin; b < end; b += kBlock) {
      const std::size_t len = std::min(kBlock, end - b);
      for (std::size_t k = 0; k < len; ++k) {
        qs[k] = points[b + k].s;
        qe[k] = points[b + k].e;
      }
      const auto dst = out.subspan(b, len);
      kernel(view, scale_s, scale_e, std::span(qs, len), std::span(qe, len), dst);
      for (auto& v : dst) v *= norm_;
    }
  });
}

std::vector<double> KdeModel::density_at(std::span<const NormalizedMoment> points,
                                         unsigned threads) const {
  std::vector<double> out(points.size());
  density_at(points, out, threads);
  return out;
}

double DensityGrid::mass() const {
  double total = 0.0;
  for (double v : values) total += v;
  return total * cell_area();
}

std::pair<int, int> DensityGrid::argmax() const {
  const auto it = std::max_element(values.begin(), values.end());
  const auto idx = static_cast<int>(it - values.begin());
  return {idx / resolution, idx % resolution};
}

DensityGrid density_grid(const KdeModel& model, int resolution, unsigned threads) {
  if (resolution < 2) throw ConfigError("grid resolution must be at least 2");
  DensityGrid grid;
  grid.resolution = resolution;
  grid.axis.resize(resolution);
  for (int i = 0; i < resolution; ++i) grid.axis[i] = (i + 0.5) / resolution;

  std::vector<NormalizedMoment> centers;
  centers.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) centers.push_back({grid.axis[i], grid.axis[j]});
  grid.values = model.density_at(centers, threads);
  return grid;
}

std::vector<NormalizedMoment> sample_from(const KdeModel& model, std::uint64_t seed,
                                          std::size_t count) {
  Rng rng(seed);
  const auto& h = model.bandwidth();
  std::vector<NormalizedMoment> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto base = model.point(static_cast<std::size_t>(rng.below(model.size())));
    NormalizedMoment draw{};
    bool accepted = false;
    for (int attempt = 0; attempt < kSampleRetries && !accepted; ++attempt) {
      draw = {rng.normal(base.s, h.s), rng.normal(base.e, h.e)};
      accepted = valid(draw);
    }
    if (!accepted) {
      draw.s = std::clamp(draw.s, 0.0, 1.0);
      draw.e = std::clamp(draw.e, 0.0, 1.0);
      if (draw.s > draw.e) std::swap(draw.s, draw.e);
    }
    out.push_back(draw);
  }
  return out;
}

}  // namespace tsgaudit
