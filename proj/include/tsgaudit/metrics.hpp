#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsgaudit/types.hpp"

namespace tsgaudit {

/// How an IoU is compared against the threshold m. `strict` is IoU > m;
/// `inclusive` is IoU >= m, as much public evaluation code does.
enum class IouComparator { strict, inclusive };

std::string_view to_string(IouComparator cmp);
IouComparator parse_comparator(std::string_view name);

/// Ranked moment predictions (seconds) per sample id, best first.
class PredictionSet {
 public:
  /// Throws StructureError on a duplicate id, an empty list or start > end.
  void add(std::string sample_id, std::vector<Moment> moments);
  const std::vector<Moment>* find(const std::string& sample_id) const;
  std::size_t size() const { return order_.size(); }
  /// Ids in insertion order.
  const std::vector<std::string>& ids() const { return order_; }

 private:
  std::vector<std::string> order_;
  std::unordered_map<std::string, std::vector<Moment>> entries_;
};

/// One JSON object per line: {"sample_id": ..., "moments": [[s, e], ...]}.
PredictionSet parse_predictions(std::istream& in);
void write_predictions(const PredictionSet& predictions, std::ostream& out);

/// Temporal IoU; 0 when the union is empty.
double iou(Moment a, Moment b);

bool passes(double overlap, double threshold, IouComparator cmp);

/// 1 iff one of the first min(n, size) predictions passes the threshold.
bool hit(int n, double m, std::span<const Moment> ranked, Moment gt,
         IouComparator cmp = IouComparator::strict);

/// (1 - |p_s - g_s|, 1 - |p_e - g_e|) over duration-normalized boundaries.
/// Normalized boundaries are clamped into [0,1] first.
std::pair<double, double> discount_factors(Moment pred, Moment gt, double duration);

/// Per-query discounted hit: 0 on a miss, otherwise alpha_s * alpha_e of
/// the passing top-n prediction with the highest IoU (better rank on ties).
double discounted_hit(int n, double m, std::span<const Moment> ranked, const Sample& gt,
                      IouComparator cmp = IouComparator::strict);

/// R@n,IoU@m averaged over every sample of `dataset`. Throws EvaluationError
/// listing the ids that have no predictions.
double recall(const PredictionSet& predictions, const Dataset& dataset, int n, double m,
              IouComparator cmp = IouComparator::strict);

/// dR@n,IoU@m averaged over every sample of `dataset`.
double discounted_recall(const PredictionSet& predictions, const Dataset& dataset, int n, double m,
                         IouComparator cmp = IouComparator::strict);

struct MetricCell {
  int n = 1;
  double m = 0.5;
  double recall = 0.0;
  double discounted_recall = 0.0;
};

struct MetricTable {
  IouComparator comparator = IouComparator::strict;
  std::vector<int> n_list;
  std::vector<double> m_list;
  std::size_t num_queries = 0;
  /// n-major: cells[a * m_list.size() + b] is (n_list[a], m_list[b]).
  std::vector<MetricCell> cells;

  const MetricCell& at(int n, double m) const;
};

inline const std::vector<int> kDefaultNList = {1, 5};
inline const std::vector<double> kDefaultMList = {0.1, 0.3, 0.5, 0.7, 0.9};

/// Both metrics over the n x m cross product. Sums run in dataset order so
/// the result is bit-stable.
MetricTable metric_table(const PredictionSet& predictions, const Dataset& dataset,
                         const std::vector<int>& n_list = kDefaultNList,
                         const std::vector<double>& m_list = kDefaultMList,
                         IouComparator cmp = IouComparator::strict);

void write_metric_report(const MetricTable& table, std::ostream& out);

}  // namespace tsgaudit
