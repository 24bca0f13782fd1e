#include "tsgaudit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "json.hpp"

namespace tsgaudit {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string describe(const Sample& s) {
  std::ostringstream os;
  os << s.sample_id << " [" << s.start << ", " << s.end << "] / " << s.duration;
  return os.str();
}

}  // namespace

IngestReport& IngestReport::operator+=(const IngestReport& other) {
  records += other.records;
  accepted += other.accepted;
  swapped += other.swapped;
  clamped += other.clamped;
  rejected += other.rejected;
  renamed += other.renamed;
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  return *this;
}

bool cleanup_sample(Sample& sample, IngestReport& report) {
  ++report.records;
  if (sample.start > sample.end) {
    std::swap(sample.start, sample.end);
    ++report.swapped;
  }
  bool clamped = false;
  if (sample.start < 0.0) {
    sample.start = 0.0;
    clamped = true;
  }
  if (sample.end > sample.duration) {
    sample.end = sample.duration;
    clamped = true;
  }
  if (clamped) ++report.clamped;
  if (!(sample.start < sample.end)) {
    ++report.rejected;
    report.warnings.push_back("rejected degenerate moment " + describe(sample));
    return false;
  }
  ++report.accepted;
  return true;
}

DurationTable parse_duration_table(std::istream& in) {
  DurationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ParseError(lineno, "expected `<video_id>,<seconds>`");
    const auto id = trim(text.substr(0, comma));
    const auto seconds = parse_double(text.substr(comma + 1));
    if (!seconds) {
      if (table.empty() && lineno == 1) continue;  // header
      throw ParseError(lineno, "non-numeric duration for " + std::string(id));
    }
    if (*seconds <= 0.0) throw ParseError(lineno, "duration must be positive for " + std::string(id));
    table[std::string(id)] = *seconds;
  }
  return table;
}

IngestResult parse_charades(std::istream& in, const DurationTable& durations, std::string name) {
  IngestResult result;
  result.dataset.name = std::move(name);
  std::vector<std::string> missing;
  std::unordered_set<std::string> missing_seen;
  std::string line;
  std::size_t index = 0;
  for (; std::getline(in, line); ++index) {
    const std::size_t lineno = index + 1;
    const auto text = trim(line);
    if (text.empty()) continue;
    const auto sep = text.find("##");
    if (sep == std::string_view::npos) throw ParseError(lineno, "missing `##` separator");

    std::istringstream head{std::string(text.substr(0, sep))};
    std::string video, start_text, end_text, extra;
    if (!(head >> video >> start_text >> end_text) || (head >> extra))
      throw ParseError(lineno, "expected `<video_id> <start> <end>` before `##`");
    const auto start = parse_double(start_text);
    const auto end = parse_double(end_text);
    if (!start || !end) throw ParseError(lineno, "non-numeric timestamp");

    const auto found = durations.find(video);
    if (found == durations.end()) {
      if (missing_seen.insert(video).second) missing.push_back(video);
      continue;
    }
    Sample sample{video + "#" + std::to_string(index), video, found->second, *start, *end,
                  std::string(trim(text.substr(sep + 2)))};
    if (cleanup_sample(sample, result.report)) result.dataset.samples.push_back(std::move(sample));
  }
  if (!missing.empty()) {
    std::string msg = "no duration for " + std::to_string(missing.size()) + " video(s):";
    for (const auto& v : missing) msg += " " + v;
    throw LookupError(msg);
  }
  return result;
}

IngestResult parse_activitynet(std::istream& in, std::string name) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw StructureError(std::string("malformed ActivityNet document: ") + e.what());
  }
  if (!doc.is_object()) throw StructureError("ActivityNet document must be an object keyed by video id");

  IngestResult result;
  result.dataset.name = std::move(name);
  // nlohmann::json objects iterate in key order, which gives a stable
  // ingestion order independent of the file's key order.
  for (const auto& [video, record] : doc.items()) {
    if (!record.is_object() || !record.contains("duration") || !record.contains("timestamps") ||
        !record.contains("sentences"))
      throw StructureError(video + ": record needs duration, timestamps and sentences");
    const auto& dur = record.at("duration");
    if (!dur.is_number() || !std::isfinite(dur.get<double>()) || dur.get<double>() <= 0.0)
      throw StructureError(video + ": duration must be a finite positive number");
    const auto& stamps = record.at("timestamps");
    const auto& sentences = record.at("sentences");
    if (!stamps.is_array() || !sentences.is_array() || stamps.size() != sentences.size())
      throw StructureError(video + ": timestamps and sentences have unequal length");

    for (std::size_t i = 0; i < stamps.size(); ++i) {
      const auto& pair = stamps[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number() ||
          !sentences[i].is_string())
        throw StructureError(video + ": entry " + std::to_string(i) + " is not [start, end] + sentence");
      Sample sample{video + "#" + std::to_string(i), video, dur.get<double>(), pair[0].get<double>(),
                    pair[1].get<double>(), std::string(trim(sentences[i].get<std::string>()))};
      if (!std::isfinite(sample.start) || !std::isfinite(sample.end))
        throw StructureError(video + ": non-finite timestamp at entry " + std::to_string(i));
      if (cleanup_sample(sample, result.report)) result.dataset.samples.push_back(std::move(sample));
    }
  }
  return result;
}

IngestResult merge(std::vector<IngestResult> parts, std::string name) {
  IngestResult out;
  out.dataset.name = std::move(name);
  std::unordered_set<std::string> ids;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    out.report += parts[p].report;
    for (auto& sample : parts[p].dataset.samples) {
      if (!ids.insert(sample.sample_id).second) {
        sample.sample_id += "@" + std::to_string(p);
        if (!ids.insert(sample.sample_id).second)
          throw StructureError("duplicate sample id after merge: " + sample.sample_id);
        ++out.report.renamed;
      }
      out.dataset.samples.push_back(std::move(sample));
    }
  }
  return out;
}

Dataset parse_canonical(std::istream& in, std::string name) {
  static const char* const kFields[] = {"sample_id", "video_id", "duration", "start", "end", "query"};
  Dataset dataset;
  dataset.name = std::move(name);
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(lineno, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(lineno, "record must be a JSON object");
    for (const char* field : kFields)
      if (!record.contains(field)) throw ParseError(lineno, std::string("missing field `") + field + "`");
    if (record.size() != std::size(kFields)) throw ParseError(lineno, "unexpected extra fields");

    Sample s;
    try {
      s.sample_id = record.at("sample_id").get<std::string>();
      s.video_id = record.at("video_id").get<std::string>();
      s.duration = record.at("duration").get<double>();
      s.start = record.at("start").get<double>();
      s.end = record.at("end").get<double>();
      s.query = record.at("query").get<std::string>();
    } catch (const json::type_error& e) {
      throw ParseError(lineno, std::string("wrong field type: ") + e.what());
    }
    if (!(s.duration > 0.0) || !(0.0 <= s.start) || !(s.start < s.end) || !(s.end <= s.duration))
      throw ParseError(lineno, "moment violates 0 <= start < end <= duration");
    if (!ids.insert(s.sample_id).second) throw ParseError(lineno, "duplicate sample_id " + s.sample_id);
    dataset.samples.push_back(std::move(s));
  }
  return dataset;
}

void write_canonical(const Dataset& dataset, std::ostream& out) {
  for (const auto& s : dataset.samples) {
    // ordered_json keeps the documented field order on disk.
    nlohmann::ordered_json record;
    record["sample_id"] = s.sample_id;
    record["video_id"] = s.video_id;
    record["duration"] = s.duration;
    record["start"] = s.start;
    record["end"] = s.end;
    record["query"] = s.query;
    out << record.dump() << '\n';
  }
}

NormalizedMoment normalize(const Sample& sample) {
  const double s = std::clamp(sample.start / sample.duration, 0.0, 1.0);
  const double e = std::clamp(sample.end / sample.duration, 0.0, 1.0);
  return {s, std::max(s, e)};
}

std::vector<NormalizedMoment> normalize_all(const Dataset& dataset) {
  std::vector<NormalizedMoment> out;
  out.reserve(dataset.size());
  for (const auto& s : dataset.samples) out.push_back(normalize(s));
  return out;
}

Dataset select(const Dataset& dataset, const std::vector<std::size_t>& indices, std::string name) {
  Dataset out;
  out.name = std::move(name);
  out.samples.reserve(indices.size());
  for (auto i : indices) out.samples.push_back(dataset.samples.at(i));
  return out;
}

}  // namespace tsgaudit
