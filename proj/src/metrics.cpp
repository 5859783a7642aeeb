#include "graphad/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace graphad {

namespace {

void check_labels(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw MetricError("scores/labels length mismatch");
  if (scores.empty()) throw MetricError("empty metric input");
  long positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw MetricError("labels must be 0 or 1");
    positives += l;
  }
  if (positives == 0 || positives == static_cast<long>(labels.size()))
    throw MetricError("metric undefined: labels contain a single class");
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_labels(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double rank_sum_pos = 0.0;
  long n1 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // ranks are 1-based
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum_pos += midrank;
        ++n1;
      }
    }
    i = j + 1;
  }
  const long n0 = static_cast<long>(n) - n1;
  return (rank_sum_pos - 0.5 * static_cast<double>(n1) * static_cast<double>(n1 + 1)) /
         (static_cast<double>(n0) * static_cast<double>(n1));
}

double f1_at_contamination(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_labels(scores, labels);
  const std::size_t n = scores.size();
  long m = 0;
  for (int l : labels) m += l;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  long tp = 0;
  for (long k = 0; k < m; ++k) tp += labels[order[static_cast<std::size_t>(k)]];
  const long fp = m - tp;
  const long fn = m - tp;
  const double denom = static_cast<double>(2 * tp + fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

bool detect_performance_flip(const std::vector<double>& per_variant_aucs) {
  for (double a : per_variant_aucs)
    if (a < 0.5) return true;
  return false;
}

}  // namespace graphad
