#include "graphad/ocpool.hpp"

#include <algorithm>
#include <cmath>

namespace graphad {

Mat<double> pool_features(std::span<const Graph> graphs, PoolKind pool) {
  if (graphs.empty()) throw ShapeError("pool_features: no graphs");
  const int dim = graphs.front().attr_dim();
  if (dim < 1) throw ShapeError("pool_features: attr_dim must be >= 1");
  Mat<double> out(static_cast<int>(graphs.size()), dim);
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const auto a = graphs[i].node_attrs.cast<double>();
    switch (pool) {
      case PoolKind::Add: out.row(static_cast<int>(i)) = a.colwise().sum(); break;
      case PoolKind::Mean: out.row(static_cast<int>(i)) = a.colwise().mean(); break;
      case PoolKind::Max: out.row(static_cast<int>(i)) = a.colwise().maxCoeff(); break;
    }
  }
  return out;
}

Mat<double> pool_features(const Dataset& ds, PoolKind pool) {
  return pool_features(std::span<const Graph>(ds.graphs), pool);
}

Mat<double> OneClassSvm::standardize(const Mat<double>& x) const {
  Mat<double> z = x.rowwise() - mean_;
  z.array().rowwise() /= scale_.array();
  return z;
}

namespace {

double median_pairwise_distance(const Mat<double>& x) {
  const int n = static_cast<int>(x.rows());
  // Deterministic subsample keeps the quadratic scan bounded.
  const int cap = 1500;
  std::vector<int> idx;
  if (n <= cap) {
    idx.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  } else {
    for (int i = 0; i < cap; ++i)
      idx.push_back(static_cast<int>(static_cast<long>(i) * n / cap));
  }
  std::vector<double> dists;
  dists.reserve(idx.size() * (idx.size() - 1) / 2);
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      dists.push_back((x.row(idx[a]) - x.row(idx[b])).norm());
  if (dists.empty()) return 0.0;
  std::nth_element(dists.begin(), dists.begin() + static_cast<long>(dists.size() / 2),
                   dists.end());
  return dists[dists.size() / 2];
}

}  // namespace

void OneClassSvm::fit(const Mat<double>& train_features, const OcPoolConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(train_features.rows());
  if (n < 2) throw ShapeError("OneClassSvm: needs at least two training rows");

  mean_ = train_features.colwise().mean();
  RowVec<double> var =
      (train_features.rowwise() - mean_).array().square().colwise().mean();
  scale_ = var.array().sqrt().max(1e-12);
  for (int j = 0; j < scale_.cols(); ++j)
    if (var(j) < 1e-24) scale_(j) = 1.0;
  const Mat<double> x = standardize(train_features);

  double bandwidth = cfg.kernel_bandwidth;
  if (bandwidth <= 0.0) bandwidth = median_pairwise_distance(x);
  if (bandwidth <= 1e-12) {
    degenerate_ = true;
    fallback_point_ = x.row(0);
    train_outlier_fraction_ = 0.0;
    return;
  }
  degenerate_ = false;
  gamma_ = 1.0 / (2.0 * bandwidth * bandwidth);

  Mat<double> kernel(n, n);
  for (int i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double k = std::exp(-gamma_ * (x.row(i) - x.row(j)).squaredNorm());
      kernel(i, j) = k;
      kernel(j, i) = k;
    }
  }

  // Dual: min 1/2 a^T K a  s.t.  0 <= a_i <= 1, sum a = nu*n.
  const double budget = cfg.nu * static_cast<double>(n);
  ColVec<double> alpha = ColVec<double>::Zero(n);
  {
    int i = 0;
    double left = budget;
    while (left > 0 && i < n) {
      alpha(i) = std::min(1.0, left);
      left -= alpha(i);
      ++i;
    }
  }
  ColVec<double> grad = kernel * alpha;

  const double tol = 1e-4;
  const long max_iter = std::max<long>(200000, 100L * n);
  for (long iter = 0; iter < max_iter; ++iter) {
    int i_up = -1, j_low = -1;
    double g_min = std::numeric_limits<double>::infinity();
    double g_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (alpha(i) < 1.0 && grad(i) < g_min) {
        g_min = grad(i);
        i_up = i;
      }
      if (alpha(i) > 0.0 && grad(i) > g_max) {
        g_max = grad(i);
        j_low = i;
      }
    }
    if (i_up < 0 || j_low < 0 || g_max - g_min < tol) break;
    const double eta =
        std::max(kernel(i_up, i_up) + kernel(j_low, j_low) - 2.0 * kernel(i_up, j_low), 1e-12);
    double delta = (g_max - g_min) / eta;
    delta = std::min({delta, 1.0 - alpha(i_up), alpha(j_low)});
    if (delta <= 0) break;
    alpha(i_up) += delta;
    alpha(j_low) -= delta;
    grad += delta * (kernel.col(i_up) - kernel.col(j_low));
  }

  // rho from free support vectors; fall back to the midpoint of the bounds.
  double rho_sum = 0.0;
  int rho_count = 0;
  for (int i = 0; i < n; ++i) {
    if (alpha(i) > 1e-8 && alpha(i) < 1.0 - 1e-8) {
      rho_sum += grad(i);
      ++rho_count;
    }
  }
  if (rho_count > 0) {
    rho_ = rho_sum / static_cast<double>(rho_count);
  } else {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      if (alpha(i) < 1.0 - 1e-8) ub = std::min(ub, grad(i));
      if (alpha(i) > 1e-8) lb = std::max(lb, grad(i));
    }
    rho_ = 0.5 * (ub + lb);
  }

  std::vector<int> sv;
  for (int i = 0; i < n; ++i)
    if (alpha(i) > 1e-10) sv.push_back(i);
  support_.resize(static_cast<int>(sv.size()), x.cols());
  alpha_.resize(static_cast<int>(sv.size()));
  for (std::size_t s = 0; s < sv.size(); ++s) {
    support_.row(static_cast<int>(s)) = x.row(sv[s]);
    alpha_(static_cast<int>(s)) = alpha(sv[s]);
  }

  int outside = 0;
  for (int i = 0; i < n; ++i)
    if (grad(i) - rho_ < 0) ++outside;
  train_outlier_fraction_ = static_cast<double>(outside) / static_cast<double>(n);
}

ColVec<double> OneClassSvm::score(const Mat<double>& features) const {
  if (mean_.size() == 0) throw StateError("OneClassSvm: score before fit");
  const Mat<double> x = standardize(features);
  ColVec<double> out(x.rows());
  if (degenerate_) {
    for (int i = 0; i < x.rows(); ++i) out(i) = (x.row(i) - fallback_point_).norm();
    return out;
  }
  for (int i = 0; i < x.rows(); ++i) {
    double dec = -rho_;
    for (int s = 0; s < support_.rows(); ++s)
      dec += alpha_(s) * std::exp(-gamma_ * (x.row(i) - support_.row(s)).squaredNorm());
    out(i) = -dec;
  }
  return out;
}

ColVec<double> ocsvm_fit_score(const Mat<double>& train_features, const Mat<double>& test_features,
                               const OcPoolConfig& cfg) {
  OneClassSvm svm;
  svm.fit(train_features, cfg);
  return svm.score(test_features);
}

}  // namespace graphad
