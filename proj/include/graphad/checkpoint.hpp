#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "graphad/config_json.hpp"
#include "graphad/train.hpp"

namespace graphad {

// Binary container: a JSON header followed by named double arrays, written
// and read back bit-exactly.
struct Checkpoint {
  Json header;
  std::vector<std::pair<std::string, Mat<double>>> arrays;

  void save(const std::filesystem::path& file) const;
  static Checkpoint load(const std::filesystem::path& file);

  const Mat<double>* find(const std::string& name) const;
};

// Serializes a detector (kind, configs, parameters, buffers, center) plus
// its training history.
void save_model(DetectorModel& model, const TrainHistory& history,
                const std::filesystem::path& file);

struct LoadedModel {
  std::unique_ptr<DetectorModel> model;
  TrainHistory history;
};

LoadedModel load_model(const std::filesystem::path& file);

}  // namespace graphad
