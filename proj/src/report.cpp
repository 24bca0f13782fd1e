#include "tsgaudit/report.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "tsgaudit/ingest.hpp"

namespace tsgaudit {
namespace {

constexpr double kTailThresholds[] = {0.3, 0.5, 0.7};

Json section(const Dataset& part, const ReportOptions& options, const VerbExtractor& extractor) {
  Json out;
  std::unordered_set<std::string> videos;
  for (const auto& s : part.samples) videos.insert(s.video_id);
  out["samples"] = part.size();
  out["videos"] = videos.size();
  if (part.empty()) {
    out["notice"] = "split is empty; no grid, histogram or verb profile";
    return out;
  }

  const auto moments = normalize_all(part);
  const auto model = KdeModel::fit(moments, options.bandwidth);
  out["bandwidth"] = {model.bandwidth().s, model.bandwidth().e};
  out["grid"] = to_json(density_grid(model, options.grid_resolution, options.threads));

  const auto hist = duration_histogram(part.samples, options.histogram_bins);
  out["histogram"] = to_json(hist);
  Json tails;
  for (double t : kTailThresholds) tails[std::to_string(t).substr(0, 3)] = length_share_above(part.samples, t);
  out["length_share_above"] = std::move(tails);
  out["verbs"] = to_json(verb_frequency(part.samples, options.top_verbs, extractor));

  if (options.verb_filter) {
    Json cond;
    cond["verb"] = *options.verb_filter;
    std::vector<NormalizedMoment> matching;
    for (std::size_t i = 0; i < part.size(); ++i) {
      const auto verbs = extractor.extract(part.samples[i]);
      if (std::find(verbs.begin(), verbs.end(), *options.verb_filter) != verbs.end())
        matching.push_back(moments[i]);
    }
    cond["samples"] = matching.size();
    if (matching.empty()) {
      cond["notice"] = "no samples contain verb `" + *options.verb_filter + "`; grid omitted";
    } else {
      const auto conditional = KdeModel::fit(matching, options.bandwidth);
      cond["grid"] = to_json(density_grid(conditional, options.grid_resolution, options.threads));
    }
    out["verb_conditional"] = std::move(cond);
  }
  return out;
}

}  // namespace

Json to_json(const DensityGrid& grid) {
  Json out;
  out["resolution"] = grid.resolution;
  out["axis"] = grid.axis;
  out["layout"] = "row-major; row index is start, column index is end";
  out["values"] = grid.values;
  out["mass"] = grid.mass();
  return out;
}

Json to_json(const Histogram& histogram) {
  Json out;
  out["bin_edges"] = histogram.bin_edges;
  out["counts"] = histogram.counts;
  out["total"] = histogram.total;
  return out;
}

Json to_json(const VerbProfile& profile) {
  Json out;
  auto entries = Json::array();
  for (const auto& [verb, count] : profile.entries) entries.push_back({{"verb", verb}, {"count", count}});
  out["entries"] = std::move(entries);
  out["total_tokens"] = profile.total_tokens;
  out["coverage"] = profile.coverage;
  return out;
}

Json to_json(const SplitConfig& config) {
  Json out;
  out["ood_fraction"] = config.ood_fraction;
  out["ratios"] = {{"training", config.ratios[0]}, {"val", config.ratios[1]}, {"test_iid", config.ratios[2]}};
  out["overlong_threshold"] = config.overlong_threshold ? Json(*config.overlong_threshold) : Json(nullptr);
  out["seed"] = config.seed;
  out["bandwidth_policy"] = config.bandwidth.to_string();
  return out;
}

Json to_json(const SplitManifest& m) {
  Json out;
  out["seed"] = m.seed;
  out["bandwidth"] = {{"s", m.bandwidth.s}, {"e", m.bandwidth.e}};
  out["config"] = to_json(m.config);
  Json samples, videos;
  for (auto label : kAllSplits) {
    samples[std::string(to_string(label))] = m.sample_counts[static_cast<std::size_t>(label)];
    videos[std::string(to_string(label))] = m.video_counts[static_cast<std::size_t>(label)];
  }
  out["sample_counts"] = std::move(samples);
  out["video_counts"] = std::move(videos);
  out["conflict_moved"] = m.conflict_moved;
  out["overlong_pinned"] = m.overlong_pinned;
  return out;
}

Json to_json(const SplitResult& result) {
  Json out;
  for (auto label : kAllSplits) {
    auto ids = Json::array();
    for (auto i : result.indices_of(label)) ids.push_back(result.sample_ids[i]);
    out[std::string(to_string(label))] = std::move(ids);
  }
  out["manifest"] = to_json(result.manifest);
  return out;
}

SplitResult split_from_json(const Json& doc, const Dataset& dataset) {
  std::unordered_map<std::string, SplitLabel> label_of;
  for (auto label : kAllSplits) {
    const auto key = std::string(to_string(label));
    if (!doc.contains(key) || !doc[key].is_array()) throw StructureError("split document lacks `" + key + "`");
    for (const auto& id : doc[key])
      if (!label_of.emplace(id.get<std::string>(), label).second)
        throw StructureError("sample " + id.get<std::string>() + " listed in more than one split");
  }
  SplitResult result;
  for (const auto& s : dataset.samples) {
    const auto it = label_of.find(s.sample_id);
    if (it == label_of.end()) throw StructureError("sample " + s.sample_id + " missing from split document");
    result.sample_ids.push_back(s.sample_id);
    result.labels.push_back(it->second);
    ++result.manifest.sample_counts[static_cast<std::size_t>(it->second)];
  }
  if (label_of.size() != dataset.size()) throw StructureError("split document lists ids absent from the dataset");
  validate_split(dataset, result);
  return result;
}

Json distribution_report(const Dataset& dataset, const SplitResult* split, const ReportOptions& options,
                         const VerbExtractor& extractor) {
  Json report;
  report["dataset"] = dataset.name;
  report["samples"] = dataset.size();
  report["grid_resolution"] = options.grid_resolution;
  report["bandwidth_policy"] = options.bandwidth.to_string();
  Json sections;
  if (split == nullptr) {
    sections["all"] = section(dataset, options, extractor);
  } else {
    validate_split(dataset, *split);
    for (auto label : kAllSplits)
      sections[std::string(to_string(label))] =
          section(select(dataset, split->indices_of(label), std::string(to_string(label))), options, extractor);
  }
  report["sections"] = std::move(sections);
  return report;
}

void write_histogram_csv(const Json& report, std::ostream& out) {
  out << "section,bin_low,bin_high,count\n";
  for (const auto& [name, sec] : report.at("sections").items()) {
    if (!sec.contains("histogram")) continue;
    const auto& h = sec["histogram"];
    for (std::size_t b = 0; b < h["counts"].size(); ++b)
      out << name << ',' << h["bin_edges"][b].dump() << ',' << h["bin_edges"][b + 1].dump() << ','
          << h["counts"][b].get<std::size_t>() << '\n';
  }
}

void write_verbs_csv(const Json& report, std::ostream& out) {
  out << "section,rank,verb,count\n";
  for (const auto& [name, sec] : report.at("sections").items()) {
    if (!sec.contains("verbs")) continue;
    std::size_t rank = 1;
    for (const auto& e : sec["verbs"]["entries"])
      out << name << ',' << rank++ << ',' << e["verb"].get<std::string>() << ',' << e["count"].get<std::size_t>()
          << '\n';
  }
}

}  // namespace tsgaudit
