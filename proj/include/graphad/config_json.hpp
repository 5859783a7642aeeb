#pragma once

#include <json.hpp>

#include "graphad/extractor.hpp"
#include "graphad/models.hpp"
#include "graphad/ocpool.hpp"
#include "graphad/train.hpp"

namespace graphad {

using Json = nlohmann::json;

const char* norm_kind_name(NormKind n);
NormKind norm_kind_from_name(const std::string& s);
const char* pool_kind_name(PoolKind p);
PoolKind pool_kind_from_name(const std::string& s);

Json to_json(const GinConfig& c);
GinConfig gin_config_from_json(const Json& j);

Json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const Json& j);

Json to_json(const ModelConfig& c);
ModelConfig model_config_from_json(const Json& j);

}  // namespace graphad
