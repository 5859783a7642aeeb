#pragma once

#include <vector>

#include "graphad/error.hpp"

namespace graphad {

// Rank-statistic AUC with midrank tie handling: the probability that a
// random anomaly (label 1) outscores a random normal (label 0). Throws
// MetricError unless both classes are present.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// F1 of the anomaly class with the threshold chosen so that exactly the true
// anomaly count is predicted anomalous; ties broken by stable index order.
double f1_at_contamination(const std::vector<double>& scores, const std::vector<int>& labels);

// True iff any experimental variant scored worse than random (strict).
bool detect_performance_flip(const std::vector<double>& per_variant_aucs);

}  // namespace graphad
