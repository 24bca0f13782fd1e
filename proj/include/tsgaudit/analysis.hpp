#pragma once

#include <cstddef>
#include <istream>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsgaudit/density.hpp"
#include "tsgaudit/splitter.hpp"
#include "tsgaudit/types.hpp"

namespace tsgaudit {

/// Counts of normalized moment lengths. Bins are right-open except the last,
/// which is closed at 1.
struct Histogram {
  std::vector<double> bin_edges;  // bin_count + 1 edges over [0,1]
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  /// Fraction of samples in the bins at or above `threshold`, read off the
  /// cumulative counts. Lengths sitting exactly on the edge are included;
  /// use length_share_above for a strict comparison. `threshold` must be one
  /// of the bin edges.
  double share_above(double threshold) const;
};

Histogram duration_histogram(std::span<const Sample> samples, int bin_count = 10);

/// Exact fraction of samples whose normalized length is > threshold.
double length_share_above(std::span<const Sample> samples, double threshold);

/// Pluggable verb source. Implementations must be deterministic.
class VerbExtractor {
 public:
  virtual ~VerbExtractor() = default;
  virtual std::vector<std::string> extract(const Sample& sample) const = 0;
};

/// Lowercases, splits on non-letters, drops auxiliaries and looks tokens up
/// in a bundled lexicon of action verbs after undoing regular inflection
/// (-s, -es, -ies, -ed, -ied, -ing with consonant doubling and e-restoration)
/// and a table of irregular forms.
class LexiconVerbExtractor final : public VerbExtractor {
 public:
  std::vector<std::string> extract(const Sample& sample) const override;
};

/// Verbs for one query, using the bundled lexicon.
std::vector<std::string> extract_verbs(std::string_view query);

/// Lemma of a single lowercase token, or nullopt if it is not a known verb.
std::optional<std::string> lemmatize_verb(std::string_view token);

/// Precomputed verbs from an external tagger: line i holds the
/// space-separated verbs of dataset sample i.
class PrecomputedVerbExtractor final : public VerbExtractor {
 public:
  /// Throws ParseError if the line count differs from the dataset size.
  PrecomputedVerbExtractor(const Dataset& dataset, std::istream& verbs);
  std::vector<std::string> extract(const Sample& sample) const override;

 private:
  std::unordered_map<std::string, std::vector<std::string>> by_id_;
};

struct VerbProfile {
  std::vector<std::pair<std::string, std::size_t>> entries;
  std::size_t total_tokens = 0;
  double coverage = 0.0;
};

/// Top-k verbs by token count, ties broken lexicographically.
VerbProfile verb_frequency(std::span<const Sample> samples, std::size_t k,
                           const VerbExtractor& extractor = LexiconVerbExtractor{});

struct ReportOptions {
  int grid_resolution = 64;
  int histogram_bins = 10;
  std::size_t top_verbs = 30;
  std::optional<std::string> verb_filter;  // e.g. "cook"
  BandwidthPolicy bandwidth = BandwidthPolicy::scott();
  unsigned threads = 1;
};

}  // namespace tsgaudit
