#include "graphad/models.hpp"

#include <algorithm>
#include <map>

namespace graphad {

namespace {
constexpr std::uint64_t kScoreSeedTag = 0x73636f7265ULL;
}

const char* model_kind_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::OCGTL: return "OCGTL";
    case ModelKind::GTL: return "GTL";
    case ModelKind::OCGIN: return "OCGIN";
    case ModelKind::GTP: return "GTP";
  }
  return "?";
}

ModelKind model_kind_from_name(const std::string& name) {
  if (name == "OCGTL") return ModelKind::OCGTL;
  if (name == "GTL") return ModelKind::GTL;
  if (name == "OCGIN") return ModelKind::OCGIN;
  if (name == "GTP") return ModelKind::GTP;
  throw ConfigError("unknown model kind '" + name + "'");
}

std::vector<std::pair<std::string, Mat<Real>>> DetectorModel::named_state() {
  std::vector<std::pair<std::string, Mat<Real>>> out;
  for (auto* p : params()) out.emplace_back(p->name, p->value);
  int i = 0;
  for (auto* b : buffers()) out.emplace_back("buffer" + std::to_string(i++), *b);
  return out;
}

void DetectorModel::load_state(const std::vector<std::pair<std::string, Mat<Real>>>& state) {
  std::map<std::string, const Mat<Real>*> by_name;
  for (const auto& [name, value] : state) by_name[name] = &value;
  for (auto* p : params()) {
    const auto it = by_name.find(p->name);
    if (it == by_name.end()) throw DataError("checkpoint missing parameter '" + p->name + "'");
    if (it->second->rows() != p->value.rows() || it->second->cols() != p->value.cols())
      throw ShapeError("checkpoint shape mismatch for '" + p->name + "'");
    p->value = *it->second;
  }
  int i = 0;
  for (auto* b : buffers()) {
    const auto it = by_name.find("buffer" + std::to_string(i++));
    if (it == by_name.end()) throw DataError("checkpoint missing buffer state");
    *b = *it->second;
  }
}

std::vector<Mat<Real>> DetectorModel::snapshot() {
  std::vector<Mat<Real>> out;
  for (auto* p : params()) out.push_back(p->value);
  for (auto* b : buffers()) out.push_back(*b);
  return out;
}

void DetectorModel::restore(const std::vector<Mat<Real>>& snap) {
  std::size_t i = 0;
  for (auto* p : params()) p->value = snap.at(i++);
  for (auto* b : buffers()) *b = snap.at(i++);
}

// ---------------------------------------------------------------------------
// OCGTL / GTL

OcgtlModel::OcgtlModel(ModelKind kind, const ModelConfig& cfg, int attr_dim, std::uint64_t seed)
    : kind_(kind), cfg_(cfg), one_class_(kind == ModelKind::OCGTL) {
  if (kind != ModelKind::OCGTL && kind != ModelKind::GTL)
    throw ConfigError("OcgtlModel: kind must be OCGTL or GTL");
  cfg_.validate();
  Rng rng(mix_seed({seed, 0x4f43ULL}));
  ref_ = FeatureExtractor<Real>(cfg_.gin, attr_dim, "f", rng);
  views_.reserve(static_cast<std::size_t>(cfg_.num_views));
  for (int k = 0; k < cfg_.num_views; ++k)
    views_.emplace_back(cfg_.gin, attr_dim, "v" + std::to_string(k + 1), rng);
  if (one_class_) theta_.reset("theta", Mat<Real>::Zero(1, cfg_.gin.output_dim()));
}

std::vector<Parameter<Real>*> OcgtlModel::params() {
  std::vector<Parameter<Real>*> out = ref_.params();
  for (auto& v : views_)
    for (auto* p : v.params()) out.push_back(p);
  if (one_class_) out.push_back(&theta_);
  return out;
}

std::vector<Mat<Real>*> OcgtlModel::buffers() {
  std::vector<Mat<Real>*> out = ref_.buffers();
  for (auto& v : views_)
    for (auto* b : v.buffers()) out.push_back(b);
  return out;
}

int OcgtlModel::loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                          std::uint64_t aug_seed) {
  (void)aug_seed;  // learnable views need no augmentation
  const auto ctx = make_ctx<Real>(make_batch(graphs));
  std::vector<int> view_ids;
  view_ids.reserve(views_.size());
  for (auto& v : views_) view_ids.push_back(v.embed_tape(t, ctx, train));
  const int gtl = gtl_loss_tape(t, ref_.embed_tape(t, ctx, train), view_ids,
                                static_cast<Real>(cfg_.temperature));
  if (!one_class_) return gtl;
  const int occ = occ_loss_tape(t, view_ids, t.param(theta_), cfg_.squared_occ);
  return add(t, occ, gtl);
}

std::vector<Mat<Real>> OcgtlModel::view_embeddings(const GraphBatch& batch) {
  std::vector<Mat<Real>> out;
  out.reserve(views_.size());
  for (auto& v : views_) out.push_back(v.embed(batch));
  return out;
}

Mat<Real> OcgtlModel::reference_embedding(const GraphBatch& batch) { return ref_.embed(batch); }

ScoreParts OcgtlModel::score_parts(std::span<const Graph> graphs) {
  const auto batch = make_batch(graphs);
  const auto views = view_embeddings(batch);
  const Mat<Real> ref = reference_embedding(batch);
  ScoreParts parts;
  parts.gtl = gtl_loss_batch(ref, views, static_cast<Real>(cfg_.temperature));
  if (one_class_) {
    parts.occ = occ_loss_batch(views, RowVec<Real>(theta_.value.row(0)), cfg_.squared_occ);
    parts.total = *parts.occ + *parts.gtl;
  } else {
    parts.total = *parts.gtl;
  }
  return parts;
}

ColVec<Real> OcgtlModel::score(std::span<const Graph> graphs) { return score_parts(graphs).total; }

// ---------------------------------------------------------------------------
// OCGIN

OcginModel::OcginModel(const ModelConfig& cfg, int attr_dim, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(mix_seed({seed, 0x4f43ULL}));
  extractor_ = FeatureExtractor<Real>(cfg_.gin, attr_dim, "f", rng);
  theta_ = Mat<Real>::Zero(1, cfg_.gin.output_dim());
}

std::vector<Parameter<Real>*> OcginModel::params() { return extractor_.params(); }

std::vector<Mat<Real>*> OcginModel::buffers() {
  std::vector<Mat<Real>*> out = extractor_.buffers();
  if (center_set_) out.push_back(&theta_);
  return out;
}

const Mat<Real>& OcginModel::center() const {
  if (!center_set_) throw StateError("OCGIN center not initialized");
  return theta_;
}

void OcginModel::set_center(Mat<Real> center) {
  if (center.rows() != 1 || center.cols() != cfg_.gin.output_dim())
    throw ShapeError("OCGIN center has wrong shape");
  theta_ = std::move(center);
  center_set_ = true;
}

RowVec<Real> OcginModel::init_center(const std::vector<Graph>& train_set) {
  if (train_set.empty()) throw ShapeError("init_center: empty training set");
  RowVec<Real> mean = RowVec<Real>::Zero(cfg_.gin.output_dim());
  const std::size_t chunk = 256;
  for (std::size_t i = 0; i < train_set.size(); i += chunk) {
    const auto n = std::min(chunk, train_set.size() - i);
    const Mat<Real> e = extractor_.embed(make_batch(std::span(train_set.data() + i, n)));
    mean += e.colwise().sum();
  }
  mean /= static_cast<Real>(train_set.size());
  for (int j = 0; j < mean.cols(); ++j) {
    if (std::abs(mean(j)) < 0.1) mean(j) = mean(j) < 0 ? -0.1 : 0.1;
  }
  set_center(mean);
  return mean;
}

void OcginModel::prepare_training(const std::vector<Graph>& train_set) {
  if (!center_set_) init_center(train_set);
}

int OcginModel::loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                          std::uint64_t aug_seed) {
  (void)aug_seed;
  if (!center_set_) throw StateError("OCGIN: loss requested before init_center");
  const auto ctx = make_ctx<Real>(make_batch(graphs));
  const int e = extractor_.embed_tape(t, ctx, train);
  const int d = sub_rowvec(t, e, t.constant(theta_));
  return sum_rows(t, mul(t, d, d));
}

ColVec<Real> OcginModel::score(std::span<const Graph> graphs) {
  if (!center_set_) throw StateError("OCGIN: scoring before init_center");
  const Mat<Real> e = extractor_.embed(make_batch(graphs));
  return (e.rowwise() - theta_.row(0)).rowwise().squaredNorm();
}

// ---------------------------------------------------------------------------
// GTP

GtpModel::GtpModel(const ModelConfig& cfg, int attr_dim, std::uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(mix_seed({seed, 0x4f43ULL}));
  extractor_ = FeatureExtractor<Real>(cfg_.gin, attr_dim, "f", rng);
  heads_.resize(static_cast<std::size_t>(cfg_.gin.num_layers));
  for (std::size_t l = 0; l < heads_.size(); ++l)
    heads_[l].init(cfg_.gin.hidden_dim, kTransformCount, "head" + std::to_string(l + 1), rng);
}

std::vector<Parameter<Real>*> GtpModel::params() {
  auto out = extractor_.params();
  for (auto& h : heads_) h.collect(out);
  return out;
}

std::vector<Mat<Real>*> GtpModel::buffers() { return extractor_.buffers(); }

int GtpModel::logits_tape(Tape<Real>& t, std::span<const Graph> graphs, int transform_idx,
                          bool train, std::uint64_t aug_seed) {
  std::vector<Graph> transformed;
  transformed.reserve(graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    TransformSpec spec;
    spec.kind = kGtpTransforms[static_cast<std::size_t>(transform_idx)];
    spec.ratio = cfg_.transform_ratio;
    spec.rng_seed = train ? mix_seed({aug_seed, i, static_cast<std::uint64_t>(transform_idx)})
                          : mix_seed({kScoreSeedTag, i, static_cast<std::uint64_t>(transform_idx)});
    transformed.push_back(apply_transform(graphs[i], spec));
  }
  const auto ctx = make_ctx<Real>(make_batch(transformed));
  const int x = t.constant(ctx.x);
  const auto layer_nodes = extractor_.layer_nodes_tape(t, x, ctx, train);
  std::vector<int> per_layer_logits;
  per_layer_logits.reserve(layer_nodes.size());
  for (std::size_t l = 0; l < layer_nodes.size(); ++l) {
    const int pooled = segment_sum(t, layer_nodes[l], ctx.seg);
    per_layer_logits.push_back(heads_[l].forward(t, pooled));
  }
  return add_list(t, per_layer_logits);
}

int GtpModel::loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                        std::uint64_t aug_seed) {
  std::vector<int> ce_terms;
  ce_terms.reserve(static_cast<std::size_t>(kTransformCount));
  for (int k = 0; k < kTransformCount; ++k)
    ce_terms.push_back(cross_entropy_tape(t, logits_tape(t, graphs, k, train, aug_seed), k));
  return add_list(t, ce_terms);
}

int GtpModel::train_root(Tape<Real>& t, int per_graph_loss) {
  // The per-graph value sums the T cross-entropy terms; the optimizer target
  // is their mean.
  return scale_const(t, mean_all(t, per_graph_loss), Real(1) / Real(kTransformCount));
}

ColVec<Real> GtpModel::score(std::span<const Graph> graphs) {
  Tape<Real> t;
  return t.val(loss_tape(t, graphs, false, 0)).col(0);
}

// ---------------------------------------------------------------------------

std::unique_ptr<DetectorModel> make_model(ModelKind kind, const ModelConfig& cfg, int attr_dim,
                                          std::uint64_t seed) {
  switch (kind) {
    case ModelKind::OCGTL:
    case ModelKind::GTL: return std::make_unique<OcgtlModel>(kind, cfg, attr_dim, seed);
    case ModelKind::OCGIN: return std::make_unique<OcginModel>(cfg, attr_dim, seed);
    case ModelKind::GTP: return std::make_unique<GtpModel>(cfg, attr_dim, seed);
  }
  throw ConfigError("unknown model kind");
}

}  // namespace graphad
