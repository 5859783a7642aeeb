#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "graphad/results.hpp"
#include "graphad/splits.hpp"

namespace graphad {

struct RunConfig {
  std::string data_root = "data";
  std::vector<std::string> datasets;
  std::vector<std::string> methods = {"OCGTL", "GTL", "OCGIN", "GTP", "OCPool"};
  std::uint64_t base_seed = 1;
  int folds = kFoldCount;  // run the first N of the 10 protocol folds
  int runs = 3;
  std::vector<int> normal_classes;  // empty = every class in turn
  int jobs = 1;
  ModelConfig model;
  TrainConfig train;
  OcPoolConfig ocpool;

  static RunConfig from_json(const Json& j);
  static RunConfig from_file(const std::filesystem::path& file);
  Json to_json() const;
  // Hash over everything that determines a cell's result (model/train/ocpool
  // configs and base_seed); fold counts, job counts and paths are excluded
  // so partial runs can be extended.
  std::string config_hash() const;

  void validate() const;
};

// Per spec: distinct cells draw disjoint deterministic seed streams.
inline std::uint64_t cell_seed(std::uint64_t base_seed, int fold, int run) {
  return base_seed * 1000 + static_cast<std::uint64_t>(fold) * 10 +
         static_cast<std::uint64_t>(run);
}

// Loads a dataset by configured name: "fixture" is the bundled synthetic
// dataset; anything else is read from data_root in TU format, with attribute
// synthesis applied for datasets shipped without node attributes.
Dataset load_dataset_for_run(const RunConfig& cfg, const std::string& name);

struct RunStats {
  int total_cells = 0;
  int computed = 0;
  int skipped = 0;
};

// Runs every (dataset, method, variant, fold, run) cell, persisting rows
// incrementally; cells already in the store are skipped when resume is set.
RunStats run_benchmark(const RunConfig& cfg, ResultsStore& store, bool resume = true);

enum class AblationMode { Pooling, NormPool };

// Returns a copy with only the two flagged design knobs changed.
RunConfig with_design_choice(RunConfig cfg, PoolKind pool, NormKind norm);

struct AblationOutput {
  RunStats stats;
  std::string table_csv;    // paired comparison table
  std::string scatter_csv;  // norm_pool mode: x = MP+BN, y = AP+GN per point
};

AblationOutput run_ablation(const RunConfig& cfg, AblationMode mode, ResultsStore& store,
                            const std::filesystem::path& out_dir, bool resume = true);

// Scores one cell (used by run_benchmark and tests): trains the method on
// the fold's train/val split and returns the scored test set.
ExperimentResult run_cell(const RunConfig& cfg, const Dataset& ds, const std::string& method,
                          const VariantSplit& split, int run);

}  // namespace graphad
