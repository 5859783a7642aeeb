#pragma once

#include <cstdint>
#include <vector>

#include "graphad/models.hpp"

namespace graphad {

struct TrainConfig {
  double lr = 1e-3;
  double lr_decay = 0.5;
  int lr_decay_every = 100;  // epochs
  int max_epochs = 500;
  int batch_size = 128;
  int early_stop_patience = 100;  // epochs without validation improvement
  std::uint64_t seed = 1;

  void validate() const {
    if (lr <= 0 || lr_decay <= 0 || lr_decay_every <= 0 || max_epochs <= 0 || batch_size <= 0 ||
        early_stop_patience <= 0)
      throw ConfigError("TrainConfig: all fields must be positive");
  }
};

struct TrainHistory {
  std::vector<double> train_loss;  // one entry per completed epoch
  std::vector<double> val_loss;
  int best_epoch = 0;  // 1-based
  double best_val_loss = 0.0;
  int epochs_run = 0;
};

// Adam with bias correction.
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<Parameter<Real>*> params, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8);
  void step(double lr);
  void zero_grad();

 private:
  std::vector<Parameter<Real>*> params_;
  std::vector<Mat<Real>> m_, v_;
  double beta1_, beta2_, eps_;
  long step_count_ = 0;
};

// Minibatch training on the model's own loss with step-decayed learning rate
// and early stopping on the validation loss; restores the parameters of the
// best validation epoch. Deterministic given cfg.seed.
TrainHistory train(DetectorModel& model, const std::vector<Graph>& train_set,
                   const std::vector<Graph>& val_set, const TrainConfig& cfg);

// Mean evaluation-mode loss (the early-stopping criterion).
double evaluate_loss(DetectorModel& model, const std::vector<Graph>& graphs, int batch_size);

}  // namespace graphad
