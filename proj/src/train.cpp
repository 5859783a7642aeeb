#include "graphad/train.hpp"

#include <cmath>
#include <sstream>

#include "graphad/rng.hpp"

namespace graphad {

AdamOptimizer::AdamOptimizer(std::vector<Parameter<Real>*> params, double beta1, double beta2,
                             double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (auto* p : params_) {
    m_.push_back(Mat<Real>::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Mat<Real>::Zero(p->value.rows(), p->value.cols()));
  }
}

void AdamOptimizer::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

void AdamOptimizer::step(double lr) {
  ++step_count_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_count_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_count_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto* p = params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p->grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
    p->value.array() -=
        lr * (m_[i].array() / bc1) / ((v_[i].array() / bc2).sqrt() + eps_);
  }
}

namespace {

double batched_root_loss(DetectorModel& model, const std::vector<Graph>& graphs, int batch_size,
                         bool train_mode, std::uint64_t aug_seed, AdamOptimizer* opt, double lr) {
  double total = 0.0;
  std::size_t count = 0;
  std::size_t batch_index = 0;
  for (std::size_t i = 0; i < graphs.size(); i += static_cast<std::size_t>(batch_size)) {
    const auto n = std::min(static_cast<std::size_t>(batch_size), graphs.size() - i);
    Tape<Real> tape;
    const int per_graph = model.loss_tape(tape, std::span(graphs.data() + i, n), train_mode,
                                          mix_seed({aug_seed, batch_index}));
    const int root = model.train_root(tape, per_graph);
    const double value = tape.val(root)(0, 0);
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg << "non-finite loss (" << value << ") in batch " << batch_index << " of "
          << model_kind_name(model.kind()) << "; per-graph losses:";
      for (int r = 0; r < std::min<int>(8, static_cast<int>(tape.val(per_graph).rows())); ++r)
        msg << " " << tape.val(per_graph)(r, 0);
      throw NumericError(msg.str());
    }
    if (opt) {
      opt->zero_grad();
      tape.backward(root);
      opt->step(lr);
    }
    total += value * static_cast<double>(n);
    count += n;
    ++batch_index;
  }
  return total / static_cast<double>(count);
}

}  // namespace

double evaluate_loss(DetectorModel& model, const std::vector<Graph>& graphs, int batch_size) {
  if (graphs.empty()) throw ShapeError("evaluate_loss: empty set");
  return batched_root_loss(model, graphs, batch_size, /*train_mode=*/false, 0, nullptr, 0.0);
}

TrainHistory train(DetectorModel& model, const std::vector<Graph>& train_set,
                   const std::vector<Graph>& val_set, const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.empty()) throw ShapeError("train: empty training set");
  if (val_set.empty()) throw ShapeError("train: empty validation set");

  model.prepare_training(train_set);
  AdamOptimizer opt(model.params());
  Rng rng(mix_seed({cfg.seed, 0x747261696eULL}));

  TrainHistory hist;
  hist.best_val_loss = std::numeric_limits<double>::infinity();
  std::vector<Mat<Real>> best = model.snapshot();

  std::vector<int> order(train_set.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const double lr =
        cfg.lr * std::pow(cfg.lr_decay, static_cast<double>((epoch - 1) / cfg.lr_decay_every));
    rng.shuffle(order);
    std::vector<Graph> shuffled;
    shuffled.reserve(train_set.size());
    for (int idx : order) shuffled.push_back(train_set[static_cast<std::size_t>(idx)]);

    double train_loss;
    try {
      train_loss = batched_root_loss(model, shuffled, cfg.batch_size, true,
                                     mix_seed({cfg.seed, static_cast<std::uint64_t>(epoch)}), &opt,
                                     lr);
    } catch (const NumericError& e) {
      throw NumericError("epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const double val_loss = evaluate_loss(model, val_set, cfg.batch_size);
    if (!std::isfinite(val_loss))
      throw NumericError("epoch " + std::to_string(epoch) + ": non-finite validation loss");

    hist.train_loss.push_back(train_loss);
    hist.val_loss.push_back(val_loss);
    hist.epochs_run = epoch;

    if (val_loss < hist.best_val_loss) {
      hist.best_val_loss = val_loss;
      hist.best_epoch = epoch;
      best = model.snapshot();
    }
    if (epoch - hist.best_epoch >= cfg.early_stop_patience) break;
  }

  model.restore(best);
  return hist;
}

}  // namespace graphad
