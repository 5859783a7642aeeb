#include "graphad/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "graphad/rng.hpp"

namespace graphad {

namespace {

// ceil(ratio * n) for ratio in (0,1).
int scaled_count(double ratio, int n) {
  return static_cast<int>(std::ceil(ratio * static_cast<double>(n)));
}

std::vector<int> sample_distinct(Rng& rng, int population, int k) {
  std::vector<int> idx(static_cast<std::size_t>(population));
  for (int i = 0; i < population; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(population - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

std::vector<std::pair<int, int>> undirected_pairs(const Graph& g) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.edges.size() / 2);
  for (const auto& [u, v] : g.edges)
    if (u < v) pairs.emplace_back(u, v);
  return pairs;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& kept_sorted) {
  std::vector<int> new_index(static_cast<std::size_t>(g.num_nodes), -1);
  for (std::size_t i = 0; i < kept_sorted.size(); ++i)
    new_index[static_cast<std::size_t>(kept_sorted[i])] = static_cast<int>(i);
  Graph out;
  out.num_nodes = static_cast<int>(kept_sorted.size());
  out.label = g.label;
  out.node_attrs.resize(out.num_nodes, g.attr_dim());
  for (std::size_t i = 0; i < kept_sorted.size(); ++i)
    out.node_attrs.row(static_cast<int>(i)) = g.node_attrs.row(kept_sorted[i]);
  for (const auto& [u, v] : g.edges) {
    const int nu = new_index[static_cast<std::size_t>(u)];
    const int nv = new_index[static_cast<std::size_t>(v)];
    if (nu >= 0 && nv >= 0) out.edges.emplace_back(nu, nv);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

Graph with_edges(const Graph& g, const std::vector<std::pair<int, int>>& pairs) {
  Graph out = g;
  out.edges.clear();
  out.edges.reserve(2 * pairs.size());
  for (const auto& [u, v] : pairs) {
    out.edges.emplace_back(u, v);
    out.edges.emplace_back(v, u);
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

}  // namespace

const char* transform_name(TransformKind kind) {
  switch (kind) {
    case TransformKind::Identity: return "identity";
    case TransformKind::NodeDrop: return "node_drop";
    case TransformKind::EdgeAdd: return "edge_add";
    case TransformKind::EdgeDrop: return "edge_drop";
    case TransformKind::AttrMask: return "attr_mask";
    case TransformKind::Subgraph: return "subgraph";
  }
  return "?";
}

Graph apply_transform(const Graph& g, const TransformSpec& spec) {
  if (g.num_nodes < 1) throw ShapeError("transform on empty graph");
  if (spec.kind == TransformKind::Identity) return g;
  if (spec.ratio <= 0.0 || spec.ratio >= 1.0)
    throw ConfigError("transform ratio must lie in (0,1)");
  Rng rng(mix_seed({spec.rng_seed, static_cast<std::uint64_t>(spec.kind)}));

  switch (spec.kind) {
    case TransformKind::NodeDrop: {
      int drop = scaled_count(spec.ratio, g.num_nodes);
      drop = std::min(drop, g.num_nodes - 1);
      if (drop <= 0) return g;
      auto dropped = sample_distinct(rng, g.num_nodes, drop);
      std::set<int> drop_set(dropped.begin(), dropped.end());
      std::vector<int> kept;
      kept.reserve(static_cast<std::size_t>(g.num_nodes - drop));
      for (int v = 0; v < g.num_nodes; ++v)
        if (!drop_set.count(v)) kept.push_back(v);
      return induced_subgraph(g, kept);
    }
    case TransformKind::EdgeDrop: {
      auto pairs = undirected_pairs(g);
      const int m = static_cast<int>(pairs.size());
      const int drop = std::min(scaled_count(spec.ratio, m), m);
      if (drop <= 0) return g;
      auto chosen = sample_distinct(rng, m, drop);
      std::set<int> drop_set(chosen.begin(), chosen.end());
      std::vector<std::pair<int, int>> kept;
      kept.reserve(static_cast<std::size_t>(m - drop));
      for (int i = 0; i < m; ++i)
        if (!drop_set.count(i)) kept.push_back(pairs[static_cast<std::size_t>(i)]);
      return with_edges(g, kept);
    }
    case TransformKind::EdgeAdd: {
      auto pairs = undirected_pairs(g);
      const int m = static_cast<int>(pairs.size());
      std::set<std::pair<int, int>> present(pairs.begin(), pairs.end());
      std::vector<std::pair<int, int>> absent;
      for (int u = 0; u < g.num_nodes; ++u)
        for (int v = u + 1; v < g.num_nodes; ++v)
          if (!present.count({u, v})) absent.emplace_back(u, v);
      const int want = std::min(scaled_count(spec.ratio, m), static_cast<int>(absent.size()));
      if (want <= 0) return g;
      auto chosen = sample_distinct(rng, static_cast<int>(absent.size()), want);
      for (int i : chosen) pairs.push_back(absent[static_cast<std::size_t>(i)]);
      return with_edges(g, pairs);
    }
    case TransformKind::AttrMask: {
      const int mask = std::min(scaled_count(spec.ratio, g.num_nodes), g.num_nodes);
      Graph out = g;
      for (int v : sample_distinct(rng, g.num_nodes, mask)) out.node_attrs.row(v).setZero();
      return out;
    }
    case TransformKind::Subgraph: {
      if (g.num_nodes == 1) return g;
      std::vector<std::vector<int>> adj(static_cast<std::size_t>(g.num_nodes));
      for (const auto& [u, v] : g.edges) adj[static_cast<std::size_t>(u)].push_back(v);
      const int steps = scaled_count(1.0 - spec.ratio, g.num_nodes);
      int cur = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(g.num_nodes)));
      std::set<int> visited{cur};
      for (int s = 0; s < steps; ++s) {
        const auto& nb = adj[static_cast<std::size_t>(cur)];
        if (nb.empty()) break;
        cur = nb[rng.next_below(nb.size())];
        visited.insert(cur);
      }
      return induced_subgraph(g, std::vector<int>(visited.begin(), visited.end()));
    }
    case TransformKind::Identity: break;
  }
  return g;
}

}  // namespace graphad
