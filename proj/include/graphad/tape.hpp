#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "graphad/error.hpp"

namespace graphad {

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using ColVec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using SpMat = Eigen::SparseMatrix<Scalar>;

// A named trainable array. Gradients accumulate into `grad` when a tape that
// registered the parameter runs backward().
template <typename Scalar>
struct Parameter {
  std::string name;
  Mat<Scalar> value;
  Mat<Scalar> grad;

  void reset(std::string n, Mat<Scalar> v) {
    name = std::move(n);
    value = std::move(v);
    grad = Mat<Scalar>::Zero(value.rows(), value.cols());
  }
  void zero_grad() { grad.setZero(); }
};

// Node-to-graph membership of a packed batch, shared by the segment ops.
struct Segments {
  std::shared_ptr<const std::vector<int>> membership;
  std::vector<int> counts;
  int group_count = 0;
};

inline Segments make_segments(std::vector<int> membership, int group_count) {
  Segments s;
  s.counts.assign(static_cast<std::size_t>(group_count), 0);
  for (int g : membership) {
    if (g < 0 || g >= group_count) throw ShapeError("membership index out of range");
    s.counts[static_cast<std::size_t>(g)]++;
  }
  s.membership = std::make_shared<const std::vector<int>>(std::move(membership));
  s.group_count = group_count;
  return s;
}

// Reverse-mode tape over dense Eigen matrices. Operations are free functions
// that append a node holding the forward value plus a pull closure; ids are
// topologically ordered by construction, so backward() is a reverse sweep.
template <typename Scalar>
class Tape {
 public:
  using Id = int;

  Id constant(Mat<Scalar> v) { return push(std::move(v)); }

  Id param(Parameter<Scalar>& p) {
    const Id id = push(p.value);
    param_nodes_.emplace_back(id, &p);
    return id;
  }

  const Mat<Scalar>& val(Id id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  Mat<Scalar>& grad(Id id) { return nodes_[static_cast<std::size_t>(id)].grad; }

  Id push(Mat<Scalar> value) {
    nodes_.push_back(Node{std::move(value), Mat<Scalar>(), {}});
    return static_cast<Id>(nodes_.size()) - 1;
  }

  void set_pull(Id id, std::function<void(Tape&)> pull) {
    nodes_[static_cast<std::size_t>(id)].pull = std::move(pull);
  }

  // Seeds d(root)/d(root) = 1 and propagates into every node and registered
  // parameter. root must be 1x1.
  void backward(Id root) {
    auto& r = nodes_[static_cast<std::size_t>(root)];
    if (r.value.rows() != 1 || r.value.cols() != 1)
      throw ShapeError("backward root must be a scalar node");
    for (auto& n : nodes_) n.grad = Mat<Scalar>::Zero(n.value.rows(), n.value.cols());
    r.grad(0, 0) = Scalar(1);
    for (Id id = root; id >= 0; --id) {
      auto& n = nodes_[static_cast<std::size_t>(id)];
      if (n.pull) n.pull(*this);
    }
    for (auto& [id, p] : param_nodes_) p->grad += nodes_[static_cast<std::size_t>(id)].grad;
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat<Scalar> value;
    Mat<Scalar> grad;
    std::function<void(Tape&)> pull;
  };
  std::vector<Node> nodes_;
  std::vector<std::pair<Id, Parameter<Scalar>*>> param_nodes_;
};

// ---------------------------------------------------------------------------
// Primitives. Each appends one node and returns its id.

namespace tapeops {

template <typename S>
void check_same_shape(const Tape<S>& t, int a, int b, const char* op) {
  if (t.val(a).rows() != t.val(b).rows() || t.val(a).cols() != t.val(b).cols())
    throw ShapeError(std::string(op) + ": operand shapes differ");
}

}  // namespace tapeops

template <typename S>
int matmul(Tape<S>& t, int a, int b) {
  if (t.val(a).cols() != t.val(b).rows()) throw ShapeError("matmul: inner dims differ");
  const int y = t.push(t.val(a) * t.val(b));
  t.set_pull(y, [y, a, b](Tape<S>& t2) {
    t2.grad(a).noalias() += t2.grad(y) * t2.val(b).transpose();
    t2.grad(b).noalias() += t2.val(a).transpose() * t2.grad(y);
  });
  return y;
}

template <typename S>
int add(Tape<S>& t, int a, int b) {
  tapeops::check_same_shape(t, a, b, "add");
  const int y = t.push(t.val(a) + t.val(b));
  t.set_pull(y, [y, a, b](Tape<S>& t2) {
    t2.grad(a) += t2.grad(y);
    t2.grad(b) += t2.grad(y);
  });
  return y;
}

template <typename S>
int add_list(Tape<S>& t, std::vector<int> ids) {
  if (ids.empty()) throw ShapeError("add_list: no operands");
  Mat<S> acc = t.val(ids[0]);
  for (std::size_t i = 1; i < ids.size(); ++i) {
    tapeops::check_same_shape(t, ids[0], ids[static_cast<int>(i)], "add_list");
    acc += t.val(ids[i]);
  }
  const int y = t.push(std::move(acc));
  t.set_pull(y, [y, ids](Tape<S>& t2) {
    for (int a : ids) t2.grad(a) += t2.grad(y);
  });
  return y;
}

template <typename S>
int sub(Tape<S>& t, int a, int b) {
  tapeops::check_same_shape(t, a, b, "sub");
  const int y = t.push(t.val(a) - t.val(b));
  t.set_pull(y, [y, a, b](Tape<S>& t2) {
    t2.grad(a) += t2.grad(y);
    t2.grad(b) -= t2.grad(y);
  });
  return y;
}

template <typename S>
int mul(Tape<S>& t, int a, int b) {
  tapeops::check_same_shape(t, a, b, "mul");
  const int y = t.push(t.val(a).cwiseProduct(t.val(b)));
  t.set_pull(y, [y, a, b](Tape<S>& t2) {
    t2.grad(a) += t2.grad(y).cwiseProduct(t2.val(b));
    t2.grad(b) += t2.grad(y).cwiseProduct(t2.val(a));
  });
  return y;
}

template <typename S>
int scale_const(Tape<S>& t, int a, S c) {
  const int y = t.push(t.val(a) * c);
  t.set_pull(y, [y, a, c](Tape<S>& t2) { t2.grad(a) += t2.grad(y) * c; });
  return y;
}

template <typename S>
int relu(Tape<S>& t, int a) {
  const int y = t.push(t.val(a).cwiseMax(S(0)));
  t.set_pull(y, [y, a](Tape<S>& t2) {
    t2.grad(a).array() +=
        t2.grad(y).array() * (t2.val(a).array() > S(0)).template cast<S>();
  });
  return y;
}

// b is a 1 x d node broadcast over rows.
template <typename S>
int add_rowvec(Tape<S>& t, int x, int b) {
  if (t.val(b).rows() != 1 || t.val(b).cols() != t.val(x).cols())
    throw ShapeError("add_rowvec: bad row vector shape");
  Mat<S> v = t.val(x);
  v.rowwise() += t.val(b).row(0);
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x, b](Tape<S>& t2) {
    t2.grad(x) += t2.grad(y);
    t2.grad(b).row(0) += t2.grad(y).colwise().sum();
  });
  return y;
}

template <typename S>
int sub_rowvec(Tape<S>& t, int x, int b) {
  if (t.val(b).rows() != 1 || t.val(b).cols() != t.val(x).cols())
    throw ShapeError("sub_rowvec: bad row vector shape");
  Mat<S> v = t.val(x);
  v.rowwise() -= t.val(b).row(0);
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x, b](Tape<S>& t2) {
    t2.grad(x) += t2.grad(y);
    t2.grad(b).row(0) -= t2.grad(y).colwise().sum();
  });
  return y;
}

// Per-column scaling by a 1 x d node.
template <typename S>
int colwise_scale(Tape<S>& t, int x, int a) {
  if (t.val(a).rows() != 1 || t.val(a).cols() != t.val(x).cols())
    throw ShapeError("colwise_scale: bad scale vector shape");
  Mat<S> v = t.val(x);
  v.array().rowwise() *= t.val(a).row(0).array();
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x, a](Tape<S>& t2) {
    t2.grad(x).array() += t2.grad(y).array().rowwise() * t2.val(a).row(0).array();
    t2.grad(a).row(0) += t2.grad(y).cwiseProduct(t2.val(x)).colwise().sum();
  });
  return y;
}

// y = A * x with a fixed symmetric adjacency (no diagonal).
template <typename S>
int neighbor_sum(Tape<S>& t, int x, std::shared_ptr<const SpMat<S>> adj) {
  if (adj->cols() != t.val(x).rows()) throw ShapeError("neighbor_sum: adjacency size mismatch");
  const int y = t.push(*adj * t.val(x));
  t.set_pull(y, [y, x, adj](Tape<S>& t2) { t2.grad(x) += *adj * t2.grad(y); });
  return y;
}

// y = (1 + e) * x with e a 1x1 node (learnable GIN epsilon).
template <typename S>
int scale_one_plus(Tape<S>& t, int x, int e) {
  if (t.val(e).size() != 1) throw ShapeError("scale_one_plus: epsilon must be 1x1");
  const S c = S(1) + t.val(e)(0, 0);
  const int y = t.push(t.val(x) * c);
  t.set_pull(y, [y, x, e, c](Tape<S>& t2) {
    t2.grad(x) += t2.grad(y) * c;
    t2.grad(e)(0, 0) += t2.grad(y).cwiseProduct(t2.val(x)).sum();
  });
  return y;
}

template <typename S>
int segment_sum(Tape<S>& t, int x, const Segments& seg) {
  const auto& mem = *seg.membership;
  if (static_cast<int>(mem.size()) != t.val(x).rows())
    throw ShapeError("segment_sum: membership length mismatch");
  Mat<S> v = Mat<S>::Zero(seg.group_count, t.val(x).cols());
  for (std::size_t i = 0; i < mem.size(); ++i)
    v.row(mem[i]) += t.val(x).row(static_cast<int>(i));
  const int y = t.push(std::move(v));
  auto memp = seg.membership;
  t.set_pull(y, [y, x, memp](Tape<S>& t2) {
    for (std::size_t i = 0; i < memp->size(); ++i)
      t2.grad(x).row(static_cast<int>(i)) += t2.grad(y).row((*memp)[i]);
  });
  return y;
}

template <typename S>
int segment_mean(Tape<S>& t, int x, const Segments& seg) {
  const auto& mem = *seg.membership;
  if (static_cast<int>(mem.size()) != t.val(x).rows())
    throw ShapeError("segment_mean: membership length mismatch");
  for (int c : seg.counts)
    if (c == 0) throw ShapeError("segment_mean: empty segment");
  Mat<S> v = Mat<S>::Zero(seg.group_count, t.val(x).cols());
  for (std::size_t i = 0; i < mem.size(); ++i)
    v.row(mem[i]) += t.val(x).row(static_cast<int>(i));
  for (int g = 0; g < seg.group_count; ++g) v.row(g) /= S(seg.counts[static_cast<std::size_t>(g)]);
  const int y = t.push(std::move(v));
  auto memp = seg.membership;
  auto counts = seg.counts;
  t.set_pull(y, [y, x, memp, counts](Tape<S>& t2) {
    for (std::size_t i = 0; i < memp->size(); ++i) {
      const int g = (*memp)[i];
      t2.grad(x).row(static_cast<int>(i)) +=
          t2.grad(y).row(g) / S(counts[static_cast<std::size_t>(g)]);
    }
  });
  return y;
}

template <typename S>
int segment_max(Tape<S>& t, int x, const Segments& seg) {
  const auto& mem = *seg.membership;
  if (static_cast<int>(mem.size()) != t.val(x).rows())
    throw ShapeError("segment_max: membership length mismatch");
  const auto& xv = t.val(x);
  const int cols = static_cast<int>(xv.cols());
  Mat<S> v(seg.group_count, cols);
  auto argrow = std::make_shared<std::vector<int>>(
      static_cast<std::size_t>(seg.group_count) * static_cast<std::size_t>(cols), -1);
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const int g = mem[i];
    for (int j = 0; j < cols; ++j) {
      int& arg = (*argrow)[static_cast<std::size_t>(g) * cols + j];
      if (arg < 0 || xv(static_cast<int>(i), j) > v(g, j)) {
        v(g, j) = xv(static_cast<int>(i), j);
        arg = static_cast<int>(i);
      }
    }
  }
  for (int c : seg.counts)
    if (c == 0) throw ShapeError("segment_max: empty segment");
  const int y = t.push(std::move(v));
  const int groups = seg.group_count;
  t.set_pull(y, [y, x, argrow, groups, cols](Tape<S>& t2) {
    for (int g = 0; g < groups; ++g)
      for (int j = 0; j < cols; ++j)
        t2.grad(x)((*argrow)[static_cast<std::size_t>(g) * cols + j], j) += t2.grad(y)(g, j);
  });
  return y;
}

// y_v = s(membership[v], :) — broadcast a per-group row back to members.
template <typename S>
int gather_rows(Tape<S>& t, int s, const Segments& seg) {
  const auto& mem = *seg.membership;
  if (t.val(s).rows() != seg.group_count) throw ShapeError("gather_rows: group count mismatch");
  Mat<S> v(static_cast<int>(mem.size()), t.val(s).cols());
  for (std::size_t i = 0; i < mem.size(); ++i) v.row(static_cast<int>(i)) = t.val(s).row(mem[i]);
  const int y = t.push(std::move(v));
  auto memp = seg.membership;
  t.set_pull(y, [y, s, memp](Tape<S>& t2) {
    for (std::size_t i = 0; i < memp->size(); ++i)
      t2.grad(s).row((*memp)[i]) += t2.grad(y).row(static_cast<int>(i));
  });
  return y;
}

template <typename S>
int colmean(Tape<S>& t, int x) {
  const int n = static_cast<int>(t.val(x).rows());
  if (n == 0) throw ShapeError("colmean: empty input");
  const int y = t.push(t.val(x).colwise().mean());
  t.set_pull(y, [y, x, n](Tape<S>& t2) {
    t2.grad(x).array().rowwise() += t2.grad(y).row(0).array() / S(n);
  });
  return y;
}

// y = (x + eps)^(-1/2), elementwise.
template <typename S>
int rsqrt_eps(Tape<S>& t, int x, S eps) {
  Mat<S> v = (t.val(x).array() + eps).rsqrt();
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x](Tape<S>& t2) {
    t2.grad(x).array() +=
        t2.grad(y).array() * S(-0.5) * t2.val(y).array().cube();
  });
  return y;
}

template <typename S>
int concat_cols(Tape<S>& t, const std::vector<int>& ids) {
  if (ids.empty()) throw ShapeError("concat_cols: no operands");
  const int rows = static_cast<int>(t.val(ids[0]).rows());
  int cols = 0;
  for (int id : ids) {
    if (t.val(id).rows() != rows) throw ShapeError("concat_cols: row counts differ");
    cols += static_cast<int>(t.val(id).cols());
  }
  Mat<S> v(rows, cols);
  int off = 0;
  for (int id : ids) {
    v.middleCols(off, t.val(id).cols()) = t.val(id);
    off += static_cast<int>(t.val(id).cols());
  }
  const int y = t.push(std::move(v));
  auto ids_copy = ids;
  t.set_pull(y, [y, ids_copy](Tape<S>& t2) {
    int o = 0;
    for (int id : ids_copy) {
      const int c = static_cast<int>(t2.val(id).cols());
      t2.grad(id) += t2.grad(y).middleCols(o, c);
      o += c;
    }
  });
  return y;
}

// Euclidean norm of every row; zero rows get a zero subgradient.
template <typename S>
int rownorm(Tape<S>& t, int x) {
  ColVec<S> norms = t.val(x).rowwise().norm();
  const int y = t.push(Mat<S>(norms));
  t.set_pull(y, [y, x](Tape<S>& t2) {
    const auto& xv = t2.val(x);
    const auto& nv = t2.val(y);
    for (int i = 0; i < xv.rows(); ++i) {
      if (nv(i, 0) > S(1e-12))
        t2.grad(x).row(i) += (t2.grad(y)(i, 0) / nv(i, 0)) * xv.row(i);
    }
  });
  return y;
}

template <typename S>
int sum_rows(Tape<S>& t, int x) {
  const int y = t.push(Mat<S>(t.val(x).rowwise().sum()));
  t.set_pull(y, [y, x](Tape<S>& t2) {
    t2.grad(x).array().colwise() += t2.grad(y).col(0).array();
  });
  return y;
}

// Cosine similarity of corresponding rows; norms below `guard` are clamped
// and treated as constants in the backward pass.
template <typename S>
int cos_rows(Tape<S>& t, int a, int b, S guard = S(1e-8)) {
  tapeops::check_same_shape(t, a, b, "cos_rows");
  const auto& av = t.val(a);
  const auto& bv = t.val(b);
  const int n = static_cast<int>(av.rows());
  Mat<S> v(n, 1);
  for (int i = 0; i < n; ++i) {
    const S na = std::max(av.row(i).norm(), guard);
    const S nb = std::max(bv.row(i).norm(), guard);
    v(i, 0) = av.row(i).dot(bv.row(i)) / (na * nb);
  }
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, a, b, guard](Tape<S>& t2) {
    const auto& av2 = t2.val(a);
    const auto& bv2 = t2.val(b);
    const auto& cv = t2.val(y);
    for (int i = 0; i < av2.rows(); ++i) {
      const S ra = av2.row(i).norm();
      const S rb = bv2.row(i).norm();
      const S na = std::max(ra, guard);
      const S nb = std::max(rb, guard);
      const S g = t2.grad(y)(i, 0);
      t2.grad(a).row(i) += g * (bv2.row(i) / (na * nb));
      if (ra > guard) t2.grad(a).row(i) -= g * (cv(i, 0) / (na * na)) * av2.row(i);
      t2.grad(b).row(i) += g * (av2.row(i) / (na * nb));
      if (rb > guard) t2.grad(b).row(i) -= g * (cv(i, 0) / (nb * nb)) * bv2.row(i);
    }
  });
  return y;
}

// Elementwise log-sum-exp across a list of equally shaped nodes, with
// max-subtraction.
template <typename S>
int logsumexp_list(Tape<S>& t, const std::vector<int>& ids) {
  if (ids.empty()) throw ShapeError("logsumexp_list: no operands");
  for (int id : ids) tapeops::check_same_shape(t, ids[0], id, "logsumexp_list");
  Mat<S> m = t.val(ids[0]);
  for (std::size_t k = 1; k < ids.size(); ++k) m = m.cwiseMax(t.val(ids[k]));
  Mat<S> acc = Mat<S>::Zero(m.rows(), m.cols());
  for (int id : ids) acc.array() += (t.val(id) - m).array().exp();
  Mat<S> v = m.array() + acc.array().log();
  const int y = t.push(std::move(v));
  auto ids_copy = ids;
  t.set_pull(y, [y, ids_copy](Tape<S>& t2) {
    for (int id : ids_copy)
      t2.grad(id).array() +=
          t2.grad(y).array() * (t2.val(id) - t2.val(y)).array().exp();
  });
  return y;
}

// Row-wise log-sum-exp over columns (n x c -> n x 1), with max-subtraction.
template <typename S>
int logsumexp_cols(Tape<S>& t, int x) {
  const auto& xv = t.val(x);
  Mat<S> v(xv.rows(), 1);
  for (int i = 0; i < xv.rows(); ++i) {
    const S m = xv.row(i).maxCoeff();
    v(i, 0) = m + std::log((xv.row(i).array() - m).exp().sum());
  }
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x](Tape<S>& t2) {
    t2.grad(x).array() += (t2.val(x).colwise() - t2.val(y).col(0)).array().exp().colwise() *
                          t2.grad(y).col(0).array();
  });
  return y;
}

// y_i = x(i, cols[i]).
template <typename S>
int col_pick(Tape<S>& t, int x, std::vector<int> cols) {
  const auto& xv = t.val(x);
  if (static_cast<int>(cols.size()) != xv.rows()) throw ShapeError("col_pick: index count mismatch");
  Mat<S> v(xv.rows(), 1);
  for (int i = 0; i < xv.rows(); ++i) {
    if (cols[static_cast<std::size_t>(i)] < 0 || cols[static_cast<std::size_t>(i)] >= xv.cols())
      throw ShapeError("col_pick: column index out of range");
    v(i, 0) = xv(i, cols[static_cast<std::size_t>(i)]);
  }
  const int y = t.push(std::move(v));
  auto cols_ptr = std::make_shared<std::vector<int>>(std::move(cols));
  t.set_pull(y, [y, x, cols_ptr](Tape<S>& t2) {
    for (int i = 0; i < t2.val(y).rows(); ++i)
      t2.grad(x)(i, (*cols_ptr)[static_cast<std::size_t>(i)]) += t2.grad(y)(i, 0);
  });
  return y;
}

template <typename S>
int mean_all(Tape<S>& t, int x) {
  const S n = S(t.val(x).size());
  if (n == S(0)) throw ShapeError("mean_all: empty input");
  Mat<S> v(1, 1);
  v(0, 0) = t.val(x).sum() / n;
  const int y = t.push(std::move(v));
  t.set_pull(y, [y, x, n](Tape<S>& t2) {
    t2.grad(x).array() += t2.grad(y)(0, 0) / n;
  });
  return y;
}

}  // namespace graphad
