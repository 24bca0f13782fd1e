#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tsgaudit {

/// One query-moment pair. Times are in seconds.
struct Sample {
  std::string sample_id;
  std::string video_id;
  double duration = 0.0;
  double start = 0.0;
  double end = 0.0;
  std::string query;

  friend bool operator==(const Sample&, const Sample&) = default;
};

/// Moment boundaries divided by the video duration; 0 <= s <= e <= 1.
struct NormalizedMoment {
  double s = 0.0;
  double e = 0.0;

  double length() const { return e - s; }
  friend bool operator==(const NormalizedMoment&, const NormalizedMoment&) = default;
};

/// A moment in seconds, used for predictions.
struct Moment {
  double start = 0.0;
  double end = 0.0;

  double length() const { return end - start; }
  friend bool operator==(const Moment&, const Moment&) = default;
};

/// Samples in ingestion order. Order is the tie-break anchor for every
/// downstream ranking, so it must never be reshuffled in place.
struct Dataset {
  std::string name;
  std::vector<Sample> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

// Error taxonomy. Everything derives from std::runtime_error so callers that
// only care about "failed" can catch one type.

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class LookupError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class StructureError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace tsgaudit
