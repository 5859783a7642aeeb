#pragma once

#include <string>
#include <vector>

#include "graphad/rng.hpp"
#include "graphad/tape.hpp"

namespace graphad {

// Symmetric uniform init scaled by fan-in, for weights and biases alike.
template <typename S>
Mat<S> uniform_fan_in(int rows, int cols, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Mat<S> m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m(i, j) = static_cast<S>((2.0 * rng.next_real() - 1.0) * bound);
  return m;
}

template <typename S>
struct Linear {
  Parameter<S> w;  // [in, out]
  Parameter<S> b;  // [1, out]

  void init(int in, int out, const std::string& prefix, Rng& rng) {
    w.reset(prefix + ".w", uniform_fan_in<S>(in, out, in, rng));
    b.reset(prefix + ".b", uniform_fan_in<S>(1, out, in, rng));
  }

  int forward(Tape<S>& t, int x) {
    return add_rowvec(t, matmul(t, x, t.param(w)), t.param(b));
  }

  void collect(std::vector<Parameter<S>*>& out) {
    out.push_back(&w);
    out.push_back(&b);
  }
};

// Per-graph normalization: out = gamma * (h - alpha*mu_g) / s_g + beta with
// s_g = sqrt(mean_g (h - alpha*mu_g)^2 + eps).
template <typename S>
struct GraphNormLayer {
  Parameter<S> alpha, gamma, beta;
  static constexpr S kEps = S(1e-5);

  void init(int dim, const std::string& prefix) {
    alpha.reset(prefix + ".alpha", Mat<S>::Ones(1, dim));
    gamma.reset(prefix + ".gamma", Mat<S>::Ones(1, dim));
    beta.reset(prefix + ".beta", Mat<S>::Zero(1, dim));
  }

  int forward(Tape<S>& t, int x, const Segments& seg) {
    const int mu = segment_mean(t, x, seg);
    const int shifted = sub(t, x, colwise_scale(t, gather_rows(t, mu, seg), t.param(alpha)));
    const int var = segment_mean(t, mul(t, shifted, shifted), seg);
    const int inv = rsqrt_eps(t, var, kEps);
    const int normed = mul(t, shifted, gather_rows(t, inv, seg));
    return add_rowvec(t, colwise_scale(t, normed, t.param(gamma)), t.param(beta));
  }

  void collect(std::vector<Parameter<S>*>& out) {
    out.push_back(&alpha);
    out.push_back(&gamma);
    out.push_back(&beta);
  }
};

// Classic batch normalization over all node rows; running statistics with
// momentum 0.1 are frozen at evaluation time.
template <typename S>
struct BatchNormLayer {
  Parameter<S> gamma, beta;
  Mat<S> running_mean, running_var;  // 1 x dim
  static constexpr S kEps = S(1e-5);
  static constexpr S kMomentum = S(0.1);

  void init(int dim, const std::string& prefix) {
    gamma.reset(prefix + ".gamma", Mat<S>::Ones(1, dim));
    beta.reset(prefix + ".beta", Mat<S>::Zero(1, dim));
    running_mean = Mat<S>::Zero(1, dim);
    running_var = Mat<S>::Ones(1, dim);
  }

  int forward(Tape<S>& t, int x, bool train) {
    if (train) {
      const int mu = colmean(t, x);
      const int centered = sub_rowvec(t, x, mu);
      const int var = colmean(t, mul(t, centered, centered));
      const int inv = rsqrt_eps(t, var, kEps);
      const int normed = colwise_scale(t, centered, inv);
      const int out = add_rowvec(t, colwise_scale(t, normed, t.param(gamma)), t.param(beta));
      const auto n = static_cast<S>(t.val(x).rows());
      const S unbias = n > S(1) ? n / (n - S(1)) : S(1);
      running_mean = (S(1) - kMomentum) * running_mean + kMomentum * t.val(mu);
      running_var = (S(1) - kMomentum) * running_var + kMomentum * unbias * t.val(var);
      return out;
    }
    const int centered = sub_rowvec(t, x, t.constant(running_mean));
    Mat<S> inv = (running_var.array() + kEps).rsqrt();
    const int normed = colwise_scale(t, centered, t.constant(std::move(inv)));
    return add_rowvec(t, colwise_scale(t, normed, t.param(gamma)), t.param(beta));
  }

  void collect(std::vector<Parameter<S>*>& out) {
    out.push_back(&gamma);
    out.push_back(&beta);
  }

  void collect_buffers(std::vector<Mat<S>*>& out) {
    out.push_back(&running_mean);
    out.push_back(&running_var);
  }
};

}  // namespace graphad
