#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "graphad/graph.hpp"

namespace graphad {

// Loads a dataset in the TU text format from `root_dir/name/` (or
// `root_dir/` directly). Mandatory files: `<name>_A.txt` (comma-separated
// 1-indexed edge pairs), `<name>_graph_indicator.txt` (1-indexed graph id
// per node line), `<name>_graph_labels.txt` (one integer per graph line).
// Optional: `<name>_node_attributes.txt` (comma-separated reals per node),
// `<name>_node_labels.txt` (one integer per node, one-hot encoded over the
// sorted label alphabet and concatenated after the continuous attributes).
// Indices are converted to 0-based; edges are deduplicated, symmetrized and
// stripped of self-loops.
Dataset load_tu_dataset(const std::filesystem::path& root_dir, const std::string& name);

// Published per-class statistics for the benchmark datasets, used to check
// a freshly loaded copy.
struct TuClassStats {
  int num_graphs = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;  // directed edge rows, i.e. symmetrized pairs
};
struct TuDatasetStats {
  int attr_dim = 0;  // after node-label encoding / attribute synthesis
  std::vector<TuClassStats> per_class;
};

std::optional<TuDatasetStats> tu_reference_stats(const std::string& name);

// Attribute synthesis required for datasets shipped without node
// attributes; nullopt when the raw attributes are used as-is.
std::optional<AttrSynthesis> tu_default_synthesis(const std::string& name);

// Compares a loaded (and attribute-synthesized) dataset against the
// reference statistics; returns a list of human-readable mismatches,
// empty when everything agrees (counts exact, averages within 0.1).
std::vector<std::string> check_against_reference(const Dataset& ds);

}  // namespace graphad
