#include "tsgaudit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace tsgaudit {
namespace {

using nlohmann::json;

void check_coverage(const PredictionSet& predictions, const Dataset& dataset) {
  std::vector<std::string> missing;
  for (const auto& s : dataset.samples)
    if (predictions.find(s.sample_id) == nullptr) missing.push_back(s.sample_id);
  if (missing.empty()) return;
  std::string msg = std::to_string(missing.size()) + " sample(s) have no predictions:";
  const std::size_t shown = std::min<std::size_t>(missing.size(), 20);
  for (std::size_t i = 0; i < shown; ++i) msg += " " + missing[i];
  if (shown < missing.size()) msg += " ...";
  throw EvaluationError(msg);
}

void check_parameters(int n, double m) {
  if (n < 1) throw ConfigError("n must be at least 1");
  if (!(m > 0.0 && m < 1.0)) throw ConfigError("IoU threshold must be in (0,1)");
}

// Rank (within the first n) of the passing prediction with the largest IoU,
// or -1 on a miss.
int best_passing(int n, double m, std::span<const Moment> ranked, Moment gt, IouComparator cmp) {
  const auto window = std::min<std::size_t>(static_cast<std::size_t>(n), ranked.size());
  int best = -1;
  double best_iou = -1.0;
  for (std::size_t r = 0; r < window; ++r) {
    const double overlap = iou(ranked[r], gt);
    if (passes(overlap, m, cmp) && overlap > best_iou) {
      best = static_cast<int>(r);
      best_iou = overlap;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(IouComparator cmp) {
  return cmp == IouComparator::strict ? "strict" : "inclusive";
}

IouComparator parse_comparator(std::string_view name) {
  if (name == "strict") return IouComparator::strict;
  if (name == "inclusive") return IouComparator::inclusive;
  throw ConfigError("comparator must be `strict` or `inclusive`");
}

void PredictionSet::add(std::string sample_id, std::vector<Moment> moments) {
  if (moments.empty()) throw StructureError(sample_id + ": prediction list is empty");
  for (const auto& mo : moments)
    if (!(mo.start <= mo.end) || !std::isfinite(mo.start) || !std::isfinite(mo.end))
      throw StructureError(sample_id + ": predicted moment has start > end or is not finite");
  if (entries_.contains(sample_id)) throw StructureError("duplicate predictions for " + sample_id);
  order_.push_back(sample_id);
  entries_.emplace(std::move(sample_id), std::move(moments));
}

const std::vector<Moment>* PredictionSet::find(const std::string& sample_id) const {
  const auto it = entries_.find(sample_id);
  return it == entries_.end() ? nullptr : &it->second;
}

PredictionSet parse_predictions(std::istream& in) {
  PredictionSet out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto record = json::parse(line);
      std::vector<Moment> moments;
      for (const auto& pair : record.at("moments")) {
        if (!pair.is_array() || pair.size() != 2) throw ParseError(lineno, "moment must be [start, end]");
        moments.push_back({pair[0].get<double>(), pair[1].get<double>()});
      }
      out.add(record.at("sample_id").get<std::string>(), std::move(moments));
    } catch (const json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const StructureError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return out;
}

void write_predictions(const PredictionSet& predictions, std::ostream& out) {
  for (const auto& id : predictions.ids()) {
    nlohmann::ordered_json record;
    record["sample_id"] = id;
    auto moments = json::array();
    for (const auto& mo : *predictions.find(id)) moments.push_back({mo.start, mo.end});
    record["moments"] = std::move(moments);
    out << record.dump() << '\n';
  }
}

double iou(Moment a, Moment b) {
  const double inter = std::max(0.0, std::min(a.end, b.end) - std::max(a.start, b.start));
  const double uni = a.length() + b.length() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

bool passes(double overlap, double threshold, IouComparator cmp) {
  return cmp == IouComparator::strict ? overlap > threshold : overlap >= threshold;
}

bool hit(int n, double m, std::span<const Moment> ranked, Moment gt, IouComparator cmp) {
  return best_passing(n, m, ranked, gt, cmp) >= 0;
}

std::pair<double, double> discount_factors(Moment pred, Moment gt, double duration) {
  const auto unit = [duration](double t) { return std::clamp(t / duration, 0.0, 1.0); };
  return {1.0 - std::abs(unit(pred.start) - unit(gt.start)), 1.0 - std::abs(unit(pred.end) - unit(gt.end))};
}

double discounted_hit(int n, double m, std::span<const Moment> ranked, const Sample& gt,
                      IouComparator cmp) {
  const Moment truth{gt.start, gt.end};
  const int best = best_passing(n, m, ranked, truth, cmp);
  if (best < 0) return 0.0;
  const auto [as, ae] = discount_factors(ranked[static_cast<std::size_t>(best)], truth, gt.duration);
  return as * ae;
}

double recall(const PredictionSet& predictions, const Dataset& dataset, int n, double m,
              IouComparator cmp) {
  return metric_table(predictions, dataset, {n}, {m}, cmp).cells.front().recall;
}

double discounted_recall(const PredictionSet& predictions, const Dataset& dataset, int n, double m,
                         IouComparator cmp) {
  return metric_table(predictions, dataset, {n}, {m}, cmp).cells.front().discounted_recall;
}

const MetricCell& MetricTable::at(int n, double m) const {
  for (const auto& cell : cells)
    if (cell.n == n && cell.m == m) return cell;
  throw std::out_of_range("metric table has no cell (" + std::to_string(n) + ", " + std::to_string(m) + ")");
}

MetricTable metric_table(const PredictionSet& predictions, const Dataset& dataset,
                         const std::vector<int>& n_list, const std::vector<double>& m_list,
                         IouComparator cmp) {
  if (n_list.empty() || m_list.empty()) throw ConfigError("n and m lists must be nonempty");
  for (int n : n_list)
    for (double m : m_list) check_parameters(n, m);
  if (dataset.empty()) throw EvaluationError("no samples to evaluate");
  check_coverage(predictions, dataset);

  MetricTable table;
  table.comparator = cmp;
  table.n_list = n_list;
  table.m_list = m_list;
  table.num_queries = dataset.size();

  std::vector<double> hits(n_list.size() * m_list.size(), 0.0);
  std::vector<double> discounted(hits.size(), 0.0);
  for (const auto& sample : dataset.samples) {
    const auto& ranked = *predictions.find(sample.sample_id);
    for (std::size_t a = 0; a < n_list.size(); ++a) {
      for (std::size_t b = 0; b < m_list.size(); ++b) {
        const double d = discounted_hit(n_list[a], m_list[b], ranked, sample, cmp);
        const bool h = hit(n_list[a], m_list[b], ranked, {sample.start, sample.end}, cmp);
        hits[a * m_list.size() + b] += h ? 1.0 : 0.0;
        discounted[a * m_list.size() + b] += d;
      }
    }
  }
  const auto nq = static_cast<double>(dataset.size());
  for (std::size_t a = 0; a < n_list.size(); ++a)
    for (std::size_t b = 0; b < m_list.size(); ++b) {
      const auto k = a * m_list.size() + b;
      table.cells.push_back({n_list[a], m_list[b], hits[k] / nq, discounted[k] / nq});
    }
  return table;
}

void write_metric_report(const MetricTable& table, std::ostream& out) {
  nlohmann::ordered_json doc;
  doc["comparator"] = std::string(to_string(table.comparator));
  doc["n_list"] = table.n_list;
  doc["m_list"] = table.m_list;
  doc["num_queries"] = table.num_queries;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& c : table.cells) {
    nlohmann::ordered_json cell;
    cell["n"] = c.n;
    cell["m"] = c.m;
    cell["recall"] = c.recall;
    cell["discounted_recall"] = c.discounted_recall;
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);
  out << doc.dump(2) << '\n';
}

}  // namespace tsgaudit
