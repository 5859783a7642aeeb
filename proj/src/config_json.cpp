#include "graphad/config_json.hpp"

namespace graphad {

const char* norm_kind_name(NormKind n) {
  switch (n) {
    case NormKind::GraphNorm: return "graph_norm";
    case NormKind::BatchNorm: return "batch_norm";
    case NormKind::None: return "none";
  }
  return "?";
}

NormKind norm_kind_from_name(const std::string& s) {
  if (s == "graph_norm") return NormKind::GraphNorm;
  if (s == "batch_norm") return NormKind::BatchNorm;
  if (s == "none") return NormKind::None;
  throw ConfigError("unknown norm kind '" + s + "'");
}

const char* pool_kind_name(PoolKind p) {
  switch (p) {
    case PoolKind::Add: return "add";
    case PoolKind::Mean: return "mean";
    case PoolKind::Max: return "max";
  }
  return "?";
}

PoolKind pool_kind_from_name(const std::string& s) {
  if (s == "add") return PoolKind::Add;
  if (s == "mean") return PoolKind::Mean;
  if (s == "max") return PoolKind::Max;
  throw ConfigError("unknown pool kind '" + s + "'");
}

Json to_json(const GinConfig& c) {
  return Json{{"num_layers", c.num_layers},
              {"hidden_dim", c.hidden_dim},
              {"norm", norm_kind_name(c.norm)},
              {"readout_pool", pool_kind_name(c.readout_pool)},
              {"readout_mlp_layers", c.readout_mlp_layers},
              {"epsilon_learnable", c.epsilon_learnable},
              {"epsilon_init", c.epsilon_init}};
}

GinConfig gin_config_from_json(const Json& j) {
  GinConfig c;
  c.num_layers = j.value("num_layers", c.num_layers);
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  if (j.contains("norm")) c.norm = norm_kind_from_name(j.at("norm").get<std::string>());
  if (j.contains("readout_pool"))
    c.readout_pool = pool_kind_from_name(j.at("readout_pool").get<std::string>());
  c.readout_mlp_layers = j.value("readout_mlp_layers", c.readout_mlp_layers);
  c.epsilon_learnable = j.value("epsilon_learnable", c.epsilon_learnable);
  c.epsilon_init = j.value("epsilon_init", c.epsilon_init);
  c.validate();
  return c;
}

Json to_json(const TrainConfig& c) {
  return Json{{"lr", c.lr},
              {"lr_decay", c.lr_decay},
              {"lr_decay_every", c.lr_decay_every},
              {"max_epochs", c.max_epochs},
              {"batch_size", c.batch_size},
              {"early_stop_patience", c.early_stop_patience}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig c;
  c.lr = j.value("lr", c.lr);
  c.lr_decay = j.value("lr_decay", c.lr_decay);
  c.lr_decay_every = j.value("lr_decay_every", c.lr_decay_every);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
  c.validate();
  return c;
}

Json to_json(const ModelConfig& c) {
  return Json{{"gin", to_json(c.gin)},
              {"temperature", c.temperature},
              {"num_views", c.num_views},
              {"squared_occ", c.squared_occ},
              {"transform_ratio", c.transform_ratio}};
}

ModelConfig model_config_from_json(const Json& j) {
  ModelConfig c;
  if (j.contains("gin")) c.gin = gin_config_from_json(j.at("gin"));
  c.temperature = j.value("temperature", c.temperature);
  c.num_views = j.value("num_views", c.num_views);
  c.squared_occ = j.value("squared_occ", c.squared_occ);
  c.transform_ratio = j.value("transform_ratio", c.transform_ratio);
  c.validate();
  return c;
}

}  // namespace graphad
