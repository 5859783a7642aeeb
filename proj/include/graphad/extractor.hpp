#pragma once

#include <memory>
#include <string>
#include <vector>

#include "graphad/graph.hpp"
#include "graphad/nn.hpp"

namespace graphad {

enum class NormKind { GraphNorm, BatchNorm, None };
enum class PoolKind { Add, Mean, Max };

struct GinConfig {
  int num_layers = 4;
  int hidden_dim = 32;
  NormKind norm = NormKind::GraphNorm;
  PoolKind readout_pool = PoolKind::Add;
  int readout_mlp_layers = 2;
  bool epsilon_learnable = false;
  double epsilon_init = 0.0;

  int output_dim() const { return num_layers * hidden_dim; }
  void validate() const {
    if (num_layers < 1 || hidden_dim < 1 || readout_mlp_layers < 1)
      throw ConfigError("GinConfig: layer and dimension counts must be >= 1");
  }
};

// A packed batch prepared for tape forwards: attributes cast to the compute
// scalar, one shared symmetric adjacency, and the node-to-graph segments.
template <typename S>
struct BatchCtx {
  Mat<S> x;
  std::shared_ptr<const SpMat<S>> adj;
  Segments seg;
  int graph_count = 0;
};

template <typename S>
BatchCtx<S> make_ctx(const GraphBatch& b) {
  BatchCtx<S> ctx;
  ctx.x = b.node_attrs.template cast<S>();
  const int n = b.total_nodes();
  std::vector<Eigen::Triplet<S>> trips;
  trips.reserve(b.edges.size());
  for (const auto& [u, v] : b.edges) trips.emplace_back(v, u, S(1));
  auto adj = std::make_shared<SpMat<S>>(n, n);
  adj->setFromTriplets(trips.begin(), trips.end());
  ctx.adj = std::move(adj);
  ctx.seg = make_segments(b.membership, b.graph_count);
  ctx.graph_count = b.graph_count;
  return ctx;
}

template <typename S>
int segment_pool(Tape<S>& t, int x, const Segments& seg, PoolKind pool) {
  switch (pool) {
    case PoolKind::Add: return segment_sum(t, x, seg);
    case PoolKind::Mean: return segment_mean(t, x, seg);
    case PoolKind::Max: return segment_max(t, x, seg);
  }
  throw ConfigError("unknown pool kind");
}

// One GIN layer: sum-aggregate with (1+eps) self term, two-layer MLP with a
// rectifier between its layers, normalization, rectifier.
template <typename S>
struct GinLayer {
  Linear<S> fc1, fc2;
  Parameter<S> eps;
  bool eps_learnable = false;
  double eps_fixed = 0.0;
  NormKind norm = NormKind::GraphNorm;
  GraphNormLayer<S> gn;
  BatchNormLayer<S> bn;

  void init(int in, int out, const GinConfig& cfg, const std::string& prefix, Rng& rng) {
    fc1.init(in, out, prefix + ".mlp1", rng);
    fc2.init(out, out, prefix + ".mlp2", rng);
    norm = cfg.norm;
    eps_learnable = cfg.epsilon_learnable;
    eps_fixed = cfg.epsilon_init;
    if (eps_learnable)
      eps.reset(prefix + ".eps", Mat<S>::Constant(1, 1, static_cast<S>(cfg.epsilon_init)));
    if (norm == NormKind::GraphNorm) gn.init(out, prefix + ".gn");
    if (norm == NormKind::BatchNorm) bn.init(out, prefix + ".bn");
  }

  int forward(Tape<S>& t, int x, const BatchCtx<S>& ctx, bool train) {
    const int neigh = neighbor_sum(t, x, ctx.adj);
    const int self = eps_learnable ? scale_one_plus(t, x, t.param(eps))
                                   : scale_const(t, x, S(1.0 + eps_fixed));
    int h = fc2.forward(t, relu(t, fc1.forward(t, add(t, neigh, self))));
    if (norm == NormKind::GraphNorm) h = gn.forward(t, h, ctx.seg);
    if (norm == NormKind::BatchNorm) h = bn.forward(t, h, train);
    return relu(t, h);
  }

  void collect(std::vector<Parameter<S>*>& out) {
    fc1.collect(out);
    fc2.collect(out);
    if (eps_learnable) out.push_back(&eps);
    if (norm == NormKind::GraphNorm) gn.collect(out);
    if (norm == NormKind::BatchNorm) bn.collect(out);
  }

  void collect_buffers(std::vector<Mat<S>*>& out) {
    if (norm == NormKind::BatchNorm) bn.collect_buffers(out);
  }
};

// Per-layer readout: node MLP (rectifiers between layers), then pooling.
template <typename S>
struct ReadoutLayer {
  std::vector<Linear<S>> mlp;
  PoolKind pool = PoolKind::Add;

  void init(int dim, const GinConfig& cfg, const std::string& prefix, Rng& rng) {
    pool = cfg.readout_pool;
    mlp.resize(static_cast<std::size_t>(cfg.readout_mlp_layers));
    for (std::size_t i = 0; i < mlp.size(); ++i)
      mlp[i].init(dim, dim, prefix + ".mlp" + std::to_string(i + 1), rng);
  }

  int forward(Tape<S>& t, int h, const Segments& seg) {
    int m = h;
    for (std::size_t i = 0; i < mlp.size(); ++i) {
      m = mlp[i].forward(t, m);
      if (i + 1 < mlp.size()) m = relu(t, m);
    }
    return segment_pool(t, m, seg, pool);
  }

  void collect(std::vector<Parameter<S>*>& out) {
    for (auto& lin : mlp) lin.collect(out);
  }
};

// GIN stack producing the concatenation of per-layer readouts.
template <typename S>
class FeatureExtractor {
 public:
  FeatureExtractor() = default;
  FeatureExtractor(const GinConfig& cfg, int input_dim, const std::string& prefix, Rng& rng)
      : cfg_(cfg), input_dim_(input_dim), prefix_(prefix) {
    cfg_.validate();
    if (input_dim < 1) throw ShapeError("extractor input dim must be >= 1");
    layers_.resize(static_cast<std::size_t>(cfg.num_layers));
    readouts_.resize(layers_.size());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      const int in = l == 0 ? input_dim : cfg.hidden_dim;
      const auto lp = prefix + ".layer" + std::to_string(l + 1);
      layers_[l].init(in, cfg.hidden_dim, cfg, lp, rng);
      readouts_[l].init(cfg.hidden_dim, cfg, lp + ".readout", rng);
    }
  }

  // Node representations after every GIN layer.
  std::vector<int> layer_nodes_tape(Tape<S>& t, int x, const BatchCtx<S>& ctx, bool train) {
    if (t.val(x).cols() != input_dim_)
      throw ShapeError("batch attr_dim " + std::to_string(t.val(x).cols()) +
                       " != extractor input dim " + std::to_string(input_dim_));
    std::vector<int> hs;
    hs.reserve(layers_.size());
    int h = x;
    for (auto& layer : layers_) {
      h = layer.forward(t, h, ctx, train);
      hs.push_back(h);
    }
    return hs;
  }

  int embed_tape(Tape<S>& t, const BatchCtx<S>& ctx, bool train) {
    const int x = t.constant(ctx.x);
    const auto hs = layer_nodes_tape(t, x, ctx, train);
    std::vector<int> pooled;
    pooled.reserve(hs.size());
    for (std::size_t l = 0; l < hs.size(); ++l)
      pooled.push_back(readouts_[l].forward(t, hs[l], ctx.seg));
    return concat_cols(t, pooled);
  }

  // Value-only forward for scoring and verification paths.
  Mat<S> embed(const GraphBatch& b, bool train = false) {
    Tape<S> t;
    const auto ctx = make_ctx<S>(b);
    return t.val(embed_tape(t, ctx, train));
  }

  std::vector<Parameter<S>*> params() {
    std::vector<Parameter<S>*> out;
    for (auto& l : layers_) l.collect(out);
    for (auto& r : readouts_) r.collect(out);
    return out;
  }

  std::vector<Mat<S>*> buffers() {
    std::vector<Mat<S>*> out;
    for (auto& l : layers_) l.collect_buffers(out);
    return out;
  }

  int output_dim() const { return cfg_.output_dim(); }
  int input_dim() const { return input_dim_; }
  const GinConfig& config() const { return cfg_; }
  const std::string& prefix() const { return prefix_; }
  std::vector<ReadoutLayer<S>>& readouts() { return readouts_; }

 private:
  GinConfig cfg_;
  int input_dim_ = 0;
  std::string prefix_;
  std::vector<GinLayer<S>> layers_;
  std::vector<ReadoutLayer<S>> readouts_;
};

}  // namespace graphad
