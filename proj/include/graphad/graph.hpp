#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "graphad/error.hpp"

namespace graphad {

using AttrMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic>;
using EdgeList = std::vector<std::pair<int, int>>;

// An attributed undirected graph. Edges are stored as a symmetric directed
// list: (u,v) present iff (v,u) present, no self-loops, endpoints in
// [0, num_nodes). node_attrs has one row per node.
struct Graph {
  int num_nodes = 0;
  EdgeList edges;
  AttrMatrix node_attrs;
  int label = 0;

  int attr_dim() const { return static_cast<int>(node_attrs.cols()); }
  int undirected_edge_count() const { return static_cast<int>(edges.size()) / 2; }

  std::vector<int> degrees() const;

  bool operator==(const Graph& other) const;
};

// Canonicalizes an arbitrary edge list: drops self-loops, deduplicates,
// mirrors every edge, and sorts lexicographically. Throws on out-of-range
// endpoints.
EdgeList symmetrize_edges(const EdgeList& raw, int num_nodes);

// Checks all Graph invariants, throwing DataError/ShapeError on violation.
void validate_graph(const Graph& g);

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::vector<int> class_ids;  // sorted distinct labels
  int attr_dim = 0;

  std::vector<int> class_counts() const;  // aligned with class_ids
};

Dataset make_dataset(std::string name, std::vector<Graph> graphs);

enum class AttrSynthesis { OneHotDegree, ConstantOne };

// Replaces node attributes: one-hot degree buckets (degrees above the cap
// clamp into the last bucket) or a constant-one column. cap < 0 means use
// the dataset's maximum degree.
Dataset synthesize_attrs(const Dataset& ds, AttrSynthesis mode, int cap = -1);

// Several graphs packed for a vectorized forward pass. membership maps each
// node row to its graph index and is non-decreasing.
struct GraphBatch {
  AttrMatrix node_attrs;  // stacked rows of member graphs
  EdgeList edges;         // node indices shifted per graph
  std::vector<int> membership;
  std::vector<int> node_offsets;  // size graph_count + 1
  std::vector<int> labels;
  int graph_count = 0;

  int total_nodes() const { return static_cast<int>(node_attrs.rows()); }
  int attr_dim() const { return static_cast<int>(node_attrs.cols()); }
};

GraphBatch make_batch(std::span<const Graph> graphs);
inline GraphBatch make_batch(const std::vector<Graph>& graphs) {
  return make_batch(std::span<const Graph>(graphs));
}

std::vector<Graph> unbatch(const GraphBatch& batch);

}  // namespace graphad
