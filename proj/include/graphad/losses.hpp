#pragma once

#include <vector>

#include "graphad/tape.hpp"

namespace graphad {

inline constexpr double kNormGuard = 1e-8;

// Cosine similarity with a small-norm guard; accepts any Eigen vector
// expressions.
template <typename DerivedA, typename DerivedB>
auto cosine_sim(const Eigen::MatrixBase<DerivedA>& z, const Eigen::MatrixBase<DerivedB>& zp) {
  using S = typename DerivedA::Scalar;
  const S na = std::max(z.norm(), static_cast<S>(kNormGuard));
  const S nb = std::max(zp.norm(), static_cast<S>(kNormGuard));
  return static_cast<S>(z.dot(zp) / (na * nb));
}

// --- value-path losses on per-graph embedding matrices (rows = graphs) ----

template <typename S>
ColVec<S> occ_loss_batch(const std::vector<Mat<S>>& views, const RowVec<S>& theta,
                         bool squared = false) {
  if (views.empty()) throw ShapeError("occ_loss: no views");
  ColVec<S> out = ColVec<S>::Zero(views.front().rows());
  for (const auto& v : views) {
    if (v.cols() != theta.cols()) throw ShapeError("occ_loss: center dim mismatch");
    const auto d = (v.rowwise() - theta).rowwise().norm();
    out += squared ? d.cwiseProduct(d).eval() : d.eval();
  }
  return out;
}

template <typename S>
ColVec<S> cos_rows_value(const Mat<S>& a, const Mat<S>& b) {
  ColVec<S> out(a.rows());
  for (int i = 0; i < a.rows(); ++i)
    out(i) = cosine_sim(a.row(i).transpose(), b.row(i).transpose());
  return out;
}

// Eq.-style transformation-learning loss: each view must be closer (in
// cosine) to the reference than to the other views. Computed with
// max-subtraction.
template <typename S>
ColVec<S> gtl_loss_batch(const Mat<S>& ref, const std::vector<Mat<S>>& views, S tau) {
  const int k_count = static_cast<int>(views.size());
  if (k_count < 2) throw ShapeError("gtl_loss: needs at least two views");
  if (tau <= S(0)) throw ShapeError("gtl_loss: temperature must be positive");
  const int g = static_cast<int>(ref.rows());
  ColVec<S> out = ColVec<S>::Zero(g);
  std::vector<std::vector<ColVec<S>>> pair(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    pair[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(k_count));
    for (int l = 0; l < k_count; ++l)
      if (l != k)
        pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
            cos_rows_value(views[static_cast<std::size_t>(k)], views[static_cast<std::size_t>(l)]) / tau;
  }
  for (int k = 0; k < k_count; ++k) {
    const ColVec<S> a_ref = cos_rows_value(views[static_cast<std::size_t>(k)], ref) / tau;
    for (int i = 0; i < g; ++i) {
      S m = a_ref(i);
      for (int l = 0; l < k_count; ++l)
        if (l != k) m = std::max(m, pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i));
      S acc = std::exp(a_ref(i) - m);
      for (int l = 0; l < k_count; ++l)
        if (l != k) acc += std::exp(pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i) - m);
      out(i) += m + std::log(acc) - a_ref(i);
    }
  }
  return out;
}

// Single-graph convenience overloads matching the per-graph definitions.
template <typename S>
S gtl_loss(const ColVec<S>& ref, const std::vector<ColVec<S>>& views, S tau) {
  Mat<S> ref_m = ref.transpose();
  std::vector<Mat<S>> view_m;
  view_m.reserve(views.size());
  for (const auto& v : views) view_m.push_back(v.transpose());
  return gtl_loss_batch(ref_m, view_m, tau)(0);
}

template <typename S>
S occ_loss(const std::vector<ColVec<S>>& views, const ColVec<S>& theta, bool squared = false) {
  std::vector<Mat<S>> view_m;
  view_m.reserve(views.size());
  for (const auto& v : views) view_m.push_back(v.transpose());
  return occ_loss_batch(view_m, RowVec<S>(theta.transpose()), squared)(0);
}

template <typename S>
ColVec<S> cross_entropy_batch(const Mat<S>& logits, int target) {
  if (target < 0 || target >= logits.cols()) throw ShapeError("cross_entropy: bad target");
  ColVec<S> out(logits.rows());
  for (int i = 0; i < logits.rows(); ++i) {
    const S m = logits.row(i).maxCoeff();
    out(i) = m + std::log((logits.row(i).array() - m).exp().sum()) - logits(i, target);
  }
  return out;
}

// --- tape-path losses (ids of per-graph embedding matrices) ---------------

template <typename S>
int occ_loss_tape(Tape<S>& t, const std::vector<int>& views, int theta_row, bool squared = false) {
  std::vector<int> norms;
  norms.reserve(views.size());
  for (int v : views) {
    const int d = sub_rowvec(t, v, theta_row);
    norms.push_back(squared ? sum_rows(t, mul(t, d, d)) : rownorm(t, d));
  }
  return add_list(t, norms);
}

template <typename S>
int gtl_loss_tape(Tape<S>& t, int ref, const std::vector<int>& views, S tau) {
  const int k_count = static_cast<int>(views.size());
  if (k_count < 2) throw ShapeError("gtl_loss: needs at least two views");
  const S inv_tau = S(1) / tau;
  std::vector<std::vector<int>> pair(static_cast<std::size_t>(k_count),
                                     std::vector<int>(static_cast<std::size_t>(k_count), -1));
  for (int k = 0; k < k_count; ++k)
    for (int l = k + 1; l < k_count; ++l) {
      const int s = scale_const(
          t, cos_rows(t, views[static_cast<std::size_t>(k)], views[static_cast<std::size_t>(l)]),
          inv_tau);
      pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] = s;
      pair[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] = s;
    }
  std::vector<int> terms;
  terms.reserve(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    const int a_ref = scale_const(t, cos_rows(t, views[static_cast<std::size_t>(k)], ref), inv_tau);
    std::vector<int> lse_args{a_ref};
    for (int l = 0; l < k_count; ++l)
      if (l != k) lse_args.push_back(pair[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]);
    terms.push_back(sub(t, logsumexp_list(t, lse_args), a_ref));
  }
  return add_list(t, terms);
}

template <typename S>
int cross_entropy_tape(Tape<S>& t, int logits, int target) {
  const int g = static_cast<int>(t.val(logits).rows());
  return sub(t, logsumexp_cols(t, logits), col_pick(t, logits, std::vector<int>(static_cast<std::size_t>(g), target)));
}

}  // namespace graphad
