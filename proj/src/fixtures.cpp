#include "graphad/fixtures.hpp"

#include <fstream>

#include "graphad/rng.hpp"

namespace graphad {

Graph random_graph(Rng& rng, int min_nodes, int max_nodes, int attr_dim, double edge_prob) {
  Graph g;
  g.num_nodes = rng.next_int(min_nodes, max_nodes);
  EdgeList raw;
  for (int u = 0; u < g.num_nodes; ++u)
    for (int v = u + 1; v < g.num_nodes; ++v)
      if (rng.next_real() < edge_prob) raw.emplace_back(u, v);
  g.edges = symmetrize_edges(raw, g.num_nodes);
  g.node_attrs.resize(g.num_nodes, attr_dim);
  for (int v = 0; v < g.num_nodes; ++v)
    for (int j = 0; j < attr_dim; ++j)
      g.node_attrs(v, j) = static_cast<float>(rng.next_normal());
  return g;
}

Dataset make_fixture_dataset(int graphs_per_class, int attr_dim, std::uint64_t seed) {
  Rng rng(mix_seed({seed, 0x66697874ULL}));
  std::vector<Graph> graphs;
  graphs.reserve(static_cast<std::size_t>(2 * graphs_per_class));
  for (int i = 0; i < graphs_per_class; ++i) {
    Graph g = random_graph(rng, 8, 14, attr_dim, 0.25);
    g.label = 0;
    graphs.push_back(std::move(g));
  }
  for (int i = 0; i < graphs_per_class; ++i) {
    Graph g = random_graph(rng, 11, 17, attr_dim, 0.55);
    g.node_attrs.col(0).array() += 1.5f;
    if (attr_dim > 1) g.node_attrs.col(1).array() *= 0.5f;
    g.label = 1;
    graphs.push_back(std::move(g));
  }
  Dataset ds = make_dataset("fixture", std::move(graphs));
  return ds;
}

void write_tu_format(const Dataset& ds, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto& name = ds.name;
  std::ofstream a(dir / (name + "_A.txt"));
  std::ofstream ind(dir / (name + "_graph_indicator.txt"));
  std::ofstream lab(dir / (name + "_graph_labels.txt"));
  std::ofstream att(dir / (name + "_node_attributes.txt"));
  int offset = 0;
  for (std::size_t gi = 0; gi < ds.graphs.size(); ++gi) {
    const Graph& g = ds.graphs[gi];
    lab << g.label << "\n";
    for (int v = 0; v < g.num_nodes; ++v) {
      ind << gi + 1 << "\n";
      for (int j = 0; j < g.attr_dim(); ++j)
        att << (j ? ", " : "") << g.node_attrs(v, j);
      att << "\n";
    }
    for (const auto& [u, v] : g.edges) a << u + 1 + offset << ", " << v + 1 + offset << "\n";
    offset += g.num_nodes;
  }
}

}  // namespace graphad
