#include "graphad/graph.hpp"

#include <algorithm>
#include <set>

namespace graphad {

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(num_nodes, 0);
  for (const auto& [u, v] : edges) deg[u]++;
  return deg;
}

bool Graph::operator==(const Graph& other) const {
  if (num_nodes != other.num_nodes || label != other.label) return false;
  if (edges != other.edges) return false;
  if (node_attrs.rows() != other.node_attrs.rows() ||
      node_attrs.cols() != other.node_attrs.cols())
    return false;
  return node_attrs == other.node_attrs;
}

EdgeList symmetrize_edges(const EdgeList& raw, int num_nodes) {
  std::set<std::pair<int, int>> undirected;
  for (const auto& [u, v] : raw) {
    if (u < 0 || v < 0 || u >= num_nodes || v >= num_nodes)
      throw DataError("edge endpoint out of range: (" + std::to_string(u) + "," +
                      std::to_string(v) + ") with " + std::to_string(num_nodes) +
                      " nodes");
    if (u == v) continue;
    undirected.emplace(std::min(u, v), std::max(u, v));
  }
  EdgeList out;
  out.reserve(2 * undirected.size());
  for (const auto& [u, v] : undirected) {
    out.emplace_back(u, v);
    out.emplace_back(v, u);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void validate_graph(const Graph& g) {
  if (g.num_nodes < 0) throw DataError("negative node count");
  if (g.node_attrs.rows() != g.num_nodes)
    throw ShapeError("node_attrs row count " + std::to_string(g.node_attrs.rows()) +
                     " != num_nodes " + std::to_string(g.num_nodes));
  std::set<std::pair<int, int>> seen;
  for (const auto& [u, v] : g.edges) {
    if (u < 0 || v < 0 || u >= g.num_nodes || v >= g.num_nodes)
      throw DataError("dangling edge endpoint");
    if (u == v) throw DataError("self-loop present after loading");
    if (!seen.emplace(u, v).second) throw DataError("duplicate directed edge");
  }
  for (const auto& [u, v] : g.edges)
    if (!seen.count({v, u})) throw DataError("edge stored asymmetrically");
  if (!g.node_attrs.allFinite()) throw DataError("non-finite node attribute");
}

std::vector<int> Dataset::class_counts() const {
  std::vector<int> counts(class_ids.size(), 0);
  for (const auto& g : graphs) {
    auto it = std::lower_bound(class_ids.begin(), class_ids.end(), g.label);
    counts[static_cast<std::size_t>(it - class_ids.begin())]++;
  }
  return counts;
}

Dataset make_dataset(std::string name, std::vector<Graph> graphs) {
  if (graphs.empty()) throw DataError("dataset '" + name + "' is empty");
  Dataset ds;
  ds.name = std::move(name);
  ds.attr_dim = graphs.front().attr_dim();
  std::set<int> labels;
  for (const auto& g : graphs) {
    validate_graph(g);
    if (g.attr_dim() != ds.attr_dim)
      throw ShapeError("attr_dim differs across graphs in dataset '" + ds.name + "'");
    labels.insert(g.label);
  }
  ds.class_ids.assign(labels.begin(), labels.end());
  ds.graphs = std::move(graphs);
  return ds;
}

Dataset synthesize_attrs(const Dataset& ds, AttrSynthesis mode, int cap) {
  Dataset out = ds;
  if (mode == AttrSynthesis::ConstantOne) {
    for (auto& g : out.graphs) g.node_attrs = AttrMatrix::Ones(g.num_nodes, 1);
    out.attr_dim = 1;
    return out;
  }
  if (cap < 0) {
    cap = 0;
    for (const auto& g : ds.graphs)
      for (int d : g.degrees()) cap = std::max(cap, d);
  }
  for (auto& g : out.graphs) {
    AttrMatrix attrs = AttrMatrix::Zero(g.num_nodes, cap + 1);
    auto deg = g.degrees();
    for (int v = 0; v < g.num_nodes; ++v) attrs(v, std::min(deg[v], cap)) = 1.0f;
    g.node_attrs = std::move(attrs);
  }
  out.attr_dim = cap + 1;
  return out;
}

GraphBatch make_batch(std::span<const Graph> graphs) {
  if (graphs.empty()) throw ShapeError("cannot batch zero graphs");
  const int dim = graphs.front().attr_dim();
  int total = 0;
  for (const auto& g : graphs) {
    if (g.attr_dim() != dim) throw ShapeError("mixed attr_dim in batch");
    total += g.num_nodes;
  }
  GraphBatch b;
  b.graph_count = static_cast<int>(graphs.size());
  b.node_attrs.resize(total, dim);
  b.membership.reserve(total);
  b.node_offsets.reserve(graphs.size() + 1);
  b.node_offsets.push_back(0);
  int offset = 0;
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    const Graph& g = graphs[i];
    b.node_attrs.middleRows(offset, g.num_nodes) = g.node_attrs;
    for (int v = 0; v < g.num_nodes; ++v) b.membership.push_back(static_cast<int>(i));
    for (const auto& [u, v] : g.edges) b.edges.emplace_back(u + offset, v + offset);
    b.labels.push_back(g.label);
    offset += g.num_nodes;
    b.node_offsets.push_back(offset);
  }
  return b;
}

std::vector<Graph> unbatch(const GraphBatch& batch) {
  std::vector<Graph> out(static_cast<std::size_t>(batch.graph_count));
  for (int i = 0; i < batch.graph_count; ++i) {
    const int begin = batch.node_offsets[i];
    const int n = batch.node_offsets[i + 1] - begin;
    out[i].num_nodes = n;
    out[i].node_attrs = batch.node_attrs.middleRows(begin, n);
    out[i].label = batch.labels[i];
  }
  for (const auto& [u, v] : batch.edges) {
    const auto it = std::upper_bound(batch.node_offsets.begin(), batch.node_offsets.end(), u);
    const int gi = static_cast<int>(it - batch.node_offsets.begin()) - 1;
    const int base = batch.node_offsets[gi];
    out[gi].edges.emplace_back(u - base, v - base);
  }
  return out;
}

}  // namespace graphad
