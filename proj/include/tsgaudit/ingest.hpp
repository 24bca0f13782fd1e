#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "tsgaudit/types.hpp"

namespace tsgaudit {

/// Counts surfaced by the annotation cleanup pass.
struct IngestReport {
  std::size_t records = 0;   // records seen
  std::size_t accepted = 0;  // samples emitted
  std::size_t swapped = 0;   // start > end, repaired by swapping
  std::size_t clamped = 0;   // start < 0 or end > duration, clamped
  std::size_t rejected = 0;  // degenerate after repair
  std::size_t renamed = 0;   // sample ids disambiguated while merging
  std::vector<std::string> warnings;

  IngestReport& operator+=(const IngestReport& other);
};

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

using DurationTable = std::unordered_map<std::string, double>;

/// Repairs one raw record in place: swap reversed bounds, then clamp into
/// [0, duration]. Returns false (and counts a rejection) when the moment is
/// empty afterwards.
bool cleanup_sample(Sample& sample, IngestReport& report);

/// `<video_id>,<seconds>` per line. A non-numeric first line is treated as
/// a header.
DurationTable parse_duration_table(std::istream& in);

/// Charades-STA layout: `<video_id> <start> <end>##<query>` per line.
/// sample_id is `<video_id>#<zero-based line index>`.
IngestResult parse_charades(std::istream& in, const DurationTable& durations,
                            std::string name = "charades");

/// ActivityNet Captions layout: {video_id: {duration, timestamps, sentences}}.
/// sample_id is `<video_id>#<pair index>`.
IngestResult parse_activitynet(std::istream& in, std::string name = "activitynet");

/// Concatenates datasets in argument order. A sample whose id already exists
/// gets `@<part index>` appended (ActivityNet val_1/val_2 share video ids).
IngestResult merge(std::vector<IngestResult> parts, std::string name);

/// Canonical JSON-lines format with exactly the six Sample fields.
Dataset parse_canonical(std::istream& in, std::string name = "canonical");
void write_canonical(const Dataset& dataset, std::ostream& out);

/// start/duration and end/duration, clamped into [0, 1].
NormalizedMoment normalize(const Sample& sample);
std::vector<NormalizedMoment> normalize_all(const Dataset& dataset);

/// Subset of `dataset` holding the samples at `indices`, in the order given.
Dataset select(const Dataset& dataset, const std::vector<std::size_t>& indices,
               std::string name);

}  // namespace tsgaudit
