#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsgaudit/analysis.hpp"
#include "tsgaudit/density.hpp"
#include "tsgaudit/splitter.hpp"

namespace tsgaudit {

using Json = nlohmann::ordered_json;

Json to_json(const DensityGrid& grid);
Json to_json(const Histogram& histogram);
Json to_json(const VerbProfile& profile);
Json to_json(const SplitConfig& config);
Json to_json(const SplitManifest& manifest);

/// {"training": [...ids], "val": [...], "test_iid": [...], "test_ood": [...],
///  "manifest": {...}}
Json to_json(const SplitResult& result);

/// Reads back the four id arrays of a split document into a SplitResult
/// aligned with `dataset`. Throws StructureError if ids do not partition it.
SplitResult split_from_json(const Json& doc, const Dataset& dataset);

/// Per split: sample/video counts, density grid, length histogram with tail
/// shares, verb profile, and optionally the grid of moments whose query
/// contains `options.verb_filter`. Sections that would be empty carry a
/// `notice` instead of data. Pass split == nullptr to describe the whole
/// dataset as a single section named "all".
Json distribution_report(const Dataset& dataset, const SplitResult* split, const ReportOptions& options,
                         const VerbExtractor& extractor);

/// Flat exports: one CSV row per histogram bin / verb, keyed by section.
void write_histogram_csv(const Json& report, std::ostream& out);
void write_verbs_csv(const Json& report, std::ostream& out);

}  // namespace tsgaudit
