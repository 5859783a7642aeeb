#pragma once

#include <span>

#include "graphad/extractor.hpp"
#include "graphad/graph.hpp"

namespace graphad {

struct OcPoolConfig {
  PoolKind pool = PoolKind::Add;
  double nu = 0.1;
  double kernel_bandwidth = 0.0;  // <= 0 selects the median heuristic

  void validate() const {
    if (nu <= 0.0 || nu > 1.0) throw ConfigError("nu must lie in (0, 1]");
  }
};

// One feature row per graph: column sums / means / maxima of node_attrs.
Mat<double> pool_features(std::span<const Graph> graphs, PoolKind pool);
Mat<double> pool_features(const Dataset& ds, PoolKind pool);

// One-class SVM with RBF kernel, trained by SMO on the standard dual
// (0 <= alpha_i <= 1, sum alpha = nu * n). Features are standardized with
// training statistics; all-identical training features fall back to
// distance-from-the-point scoring.
class OneClassSvm {
 public:
  void fit(const Mat<double>& train_features, const OcPoolConfig& cfg);
  // Higher = more anomalous (negated decision value).
  ColVec<double> score(const Mat<double>& features) const;
  // Fraction of training points strictly outside the learned boundary.
  double train_outlier_fraction() const { return train_outlier_fraction_; }
  bool degenerate() const { return degenerate_; }

 private:
  Mat<double> standardize(const Mat<double>& x) const;

  RowVec<double> mean_, scale_;
  Mat<double> support_;  // standardized support vectors
  ColVec<double> alpha_;
  double rho_ = 0.0;
  double gamma_ = 1.0;
  bool degenerate_ = false;
  RowVec<double> fallback_point_;
  double train_outlier_fraction_ = 0.0;
};

ColVec<double> ocsvm_fit_score(const Mat<double>& train_features, const Mat<double>& test_features,
                               const OcPoolConfig& cfg);

}  // namespace graphad
