#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphad/extractor.hpp"
#include "graphad/losses.hpp"
#include "graphad/transforms.hpp"

namespace graphad {

using Real = double;

enum class ModelKind { OCGTL, GTL, OCGIN, GTP };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

struct ModelConfig {
  GinConfig gin;
  double temperature = 0.1;  // tau
  int num_views = 6;         // K; also the transform count for GTP
  bool squared_occ = false;
  double transform_ratio = 0.2;

  void validate() const {
    gin.validate();
    if (temperature <= 0) throw ConfigError("temperature must be positive");
    if (num_views < 2) throw ConfigError("num_views must be >= 2");
  }
};

struct ScoreParts {
  ColVec<Real> total;
  std::optional<ColVec<Real>> occ;
  std::optional<ColVec<Real>> gtl;
};

// A trainable anomaly detector. loss_tape() appends the per-graph loss
// vector (1 column) for a batch of graphs; score() is the evaluation-mode
// anomaly score (higher = more anomalous) and mutates nothing.
class DetectorModel {
 public:
  virtual ~DetectorModel() = default;
  virtual ModelKind kind() const = 0;
  virtual std::vector<Parameter<Real>*> params() = 0;
  virtual std::vector<Mat<Real>*> buffers() { return {}; }
  virtual int loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                        std::uint64_t aug_seed) = 0;
  // Scalar node the optimizer descends on; defaults to the batch mean.
  virtual int train_root(Tape<Real>& t, int per_graph_loss) { return mean_all(t, per_graph_loss); }
  virtual ColVec<Real> score(std::span<const Graph> graphs) = 0;
  virtual ScoreParts score_parts(std::span<const Graph> graphs) {
    return {score(graphs), std::nullopt, std::nullopt};
  }
  // Hook invoked by the trainer before the first epoch.
  virtual void prepare_training(const std::vector<Graph>& train_set) { (void)train_set; }
  virtual const ModelConfig& config() const = 0;
  virtual int input_dim() const = 0;

  std::vector<std::pair<std::string, Mat<Real>>> named_state();
  void load_state(const std::vector<std::pair<std::string, Mat<Real>>>& state);

  std::vector<Mat<Real>> snapshot();
  void restore(const std::vector<Mat<Real>>& snap);
};

// OCGTL (one-class term + transformation learning) and its GTL ablation
// (transformation learning only; no center).
class OcgtlModel : public DetectorModel {
 public:
  OcgtlModel(ModelKind kind, const ModelConfig& cfg, int attr_dim, std::uint64_t seed);

  ModelKind kind() const override { return kind_; }
  std::vector<Parameter<Real>*> params() override;
  std::vector<Mat<Real>*> buffers() override;
  int loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                std::uint64_t aug_seed) override;
  ColVec<Real> score(std::span<const Graph> graphs) override;
  ScoreParts score_parts(std::span<const Graph> graphs) override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return ref_.input_dim(); }

  // Evaluation-mode embeddings of the K views and the reference.
  std::vector<Mat<Real>> view_embeddings(const GraphBatch& batch);
  Mat<Real> reference_embedding(const GraphBatch& batch);
  const Parameter<Real>* theta() const { return one_class_ ? &theta_ : nullptr; }
  Parameter<Real>* mutable_theta() { return one_class_ ? &theta_ : nullptr; }

 private:
  ModelKind kind_;
  ModelConfig cfg_;
  bool one_class_;
  FeatureExtractor<Real> ref_;
  std::vector<FeatureExtractor<Real>> views_;
  Parameter<Real> theta_;
};

// Deep one-class detector with a fixed center (improved OCGIN).
class OcginModel : public DetectorModel {
 public:
  OcginModel(const ModelConfig& cfg, int attr_dim, std::uint64_t seed);

  ModelKind kind() const override { return ModelKind::OCGIN; }
  std::vector<Parameter<Real>*> params() override;
  std::vector<Mat<Real>*> buffers() override;
  int loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                std::uint64_t aug_seed) override;
  ColVec<Real> score(std::span<const Graph> graphs) override;
  void prepare_training(const std::vector<Graph>& train_set) override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return extractor_.input_dim(); }

  // Mean initial embedding over the training set; coordinates with
  // |theta_j| < 0.1 are pushed to +-0.1, sign-preserving.
  RowVec<Real> init_center(const std::vector<Graph>& train_set);
  bool center_initialized() const { return center_set_; }
  const Mat<Real>& center() const;
  void set_center(Mat<Real> center);

 private:
  ModelConfig cfg_;
  FeatureExtractor<Real> extractor_;
  Mat<Real> theta_;  // 1 x output_dim, fixed buffer
  bool center_set_ = false;
};

// Transformation-prediction detector with hand-crafted graph transforms and
// per-layer linear heads summed into the logits.
class GtpModel : public DetectorModel {
 public:
  GtpModel(const ModelConfig& cfg, int attr_dim, std::uint64_t seed);

  ModelKind kind() const override { return ModelKind::GTP; }
  std::vector<Parameter<Real>*> params() override;
  std::vector<Mat<Real>*> buffers() override;
  int loss_tape(Tape<Real>& t, std::span<const Graph> graphs, bool train,
                std::uint64_t aug_seed) override;
  int train_root(Tape<Real>& t, int per_graph_loss) override;
  ColVec<Real> score(std::span<const Graph> graphs) override;
  const ModelConfig& config() const override { return cfg_; }
  int input_dim() const override { return extractor_.input_dim(); }

  static constexpr int kTransformCount = static_cast<int>(kGtpTransforms.size());

 private:
  int logits_tape(Tape<Real>& t, std::span<const Graph> graphs, int transform_idx, bool train,
                  std::uint64_t aug_seed);

  ModelConfig cfg_;
  FeatureExtractor<Real> extractor_;
  std::vector<Linear<Real>> heads_;  // one per GIN layer
};

std::unique_ptr<DetectorModel> make_model(ModelKind kind, const ModelConfig& cfg, int attr_dim,
                                          std::uint64_t seed);

}  // namespace graphad
