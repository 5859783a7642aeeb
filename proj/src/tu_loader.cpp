#include "graphad/tu_loader.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace graphad {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw DataError("missing mandatory file: " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::vector<double> parse_reals(const std::string& line, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw DataError("unparsable value '" + tok + "' in " + where);
    out.push_back(v);
  }
  if (out.empty()) throw DataError("empty line in " + where);
  return out;
}

long parse_int(const std::string& tok, const std::string& where) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str()) throw DataError("unparsable integer '" + tok + "' in " + where);
  return v;
}

}  // namespace

Dataset load_tu_dataset(const std::filesystem::path& root_dir, const std::string& name) {
  namespace fs = std::filesystem;
  fs::path dir = root_dir / name;
  if (!fs::exists(dir / (name + "_A.txt"))) dir = root_dir;
  const auto file = [&](const char* suffix) { return dir / (name + suffix); };

  const auto indicator_lines = read_lines(file("_graph_indicator.txt"));
  const auto label_lines = read_lines(file("_graph_labels.txt"));
  const auto edge_lines = read_lines(file("_A.txt"));

  const int num_nodes_total = static_cast<int>(indicator_lines.size());
  const int num_graphs = static_cast<int>(label_lines.size());

  std::vector<int> node_graph(num_nodes_total);
  std::vector<int> graph_sizes(num_graphs, 0);
  for (int i = 0; i < num_nodes_total; ++i) {
    const long gid = parse_int(indicator_lines[i], "graph_indicator");
    if (gid < 1 || gid > num_graphs)
      throw DataError("graph indicator " + std::to_string(gid) + " out of range");
    node_graph[i] = static_cast<int>(gid) - 1;
    graph_sizes[node_graph[i]]++;
  }
  std::vector<int> node_local(num_nodes_total);
  std::vector<int> graph_offset(num_graphs, 0);
  {
    std::vector<int> next(num_graphs, 0);
    for (int g = 1; g < num_graphs; ++g) graph_offset[g] = graph_offset[g - 1] + graph_sizes[g - 1];
    for (int i = 0; i < num_nodes_total; ++i) node_local[i] = next[node_graph[i]]++;
  }

  // Continuous attributes and/or one-hot encoded node labels.
  int cont_dim = 0;
  std::vector<std::vector<double>> cont;
  const fs::path attr_file = file("_node_attributes.txt");
  if (fs::exists(attr_file)) {
    const auto lines = read_lines(attr_file);
    if (static_cast<int>(lines.size()) != num_nodes_total)
      throw DataError("node_attributes line count != node count");
    cont.reserve(lines.size());
    for (const auto& l : lines) cont.push_back(parse_reals(l, "node_attributes"));
    cont_dim = static_cast<int>(cont.front().size());
    for (const auto& row : cont)
      if (static_cast<int>(row.size()) != cont_dim)
        throw DataError("ragged node_attributes rows");
  }

  std::vector<int> node_label;
  std::vector<int> label_alphabet;
  const fs::path nlabel_file = file("_node_labels.txt");
  if (fs::exists(nlabel_file)) {
    const auto lines = read_lines(nlabel_file);
    if (static_cast<int>(lines.size()) != num_nodes_total)
      throw DataError("node_labels line count != node count");
    node_label.reserve(lines.size());
    std::set<int> alphabet;
    for (const auto& l : lines) {
      const int v = static_cast<int>(parse_int(l, "node_labels"));
      node_label.push_back(v);
      alphabet.insert(v);
    }
    label_alphabet.assign(alphabet.begin(), alphabet.end());
  }
  const int onehot_dim = static_cast<int>(label_alphabet.size());
  const int attr_dim = cont_dim + onehot_dim;

  std::vector<Graph> graphs(static_cast<std::size_t>(num_graphs));
  for (int g = 0; g < num_graphs; ++g) {
    graphs[g].num_nodes = graph_sizes[g];
    graphs[g].label = static_cast<int>(parse_int(label_lines[g], "graph_labels"));
    graphs[g].node_attrs = AttrMatrix::Zero(graph_sizes[g], attr_dim);
  }
  for (int i = 0; i < num_nodes_total; ++i) {
    Graph& g = graphs[node_graph[i]];
    const int row = node_local[i];
    for (int j = 0; j < cont_dim; ++j)
      g.node_attrs(row, j) = static_cast<float>(cont[i][j]);
    if (onehot_dim > 0) {
      const auto it = std::lower_bound(label_alphabet.begin(), label_alphabet.end(), node_label[i]);
      g.node_attrs(row, cont_dim + static_cast<int>(it - label_alphabet.begin())) = 1.0f;
    }
  }

  std::vector<EdgeList> raw_edges(static_cast<std::size_t>(num_graphs));
  for (const auto& line : edge_lines) {
    const auto pair = parse_reals(line, "_A.txt");
    if (pair.size() != 2) throw DataError("edge line is not a pair: " + line);
    const int u = static_cast<int>(pair[0]) - 1;
    const int v = static_cast<int>(pair[1]) - 1;
    if (u < 0 || v < 0 || u >= num_nodes_total || v >= num_nodes_total)
      throw DataError("dangling node index in edge (" + std::to_string(u + 1) + "," +
                      std::to_string(v + 1) + ")");
    if (node_graph[u] != node_graph[v])
      throw DataError("edge connects two graphs: line '" + line + "'");
    raw_edges[node_graph[u]].emplace_back(node_local[u], node_local[v]);
  }
  for (int g = 0; g < num_graphs; ++g)
    graphs[g].edges = symmetrize_edges(raw_edges[g], graphs[g].num_nodes);

  return make_dataset(name, std::move(graphs));
}

std::optional<TuDatasetStats> tu_reference_stats(const std::string& name) {
  static const std::map<std::string, TuDatasetStats> table = {
      {"DD", {89, {{691, 355.2, 1806.6}, {487, 183.7, 898.9}}}},
      {"PROTEINS", {3, {{663, 50.0, 188.1}, {450, 22.9, 83.0}}}},
      {"ENZYMES",
       {3,
        {{100, 36.2, 132.7},
         {100, 29.9, 113.8},
         {100, 28.9, 111.2},
         {100, 38.2, 148.8},
         {100, 31.4, 119.6},
         {100, 31.2, 119.6}}}},
      {"NCI1", {37, {{2053, 25.7, 55.3}, {2057, 34.1, 73.9}}}},
      {"AIDS", {38, {{400, 37.6, 80.5}, {1600, 10.2, 20.4}}}},
      {"Mutagenicity", {14, {{2401, 29.4, 60.6}, {1936, 31.5, 62.7}}}},
      {"IMDB-BINARY", {136, {{500, 20.1, 193.6}, {500, 19.4, 192.6}}}},
      {"REDDIT-BINARY", {1, {{1000, 641.3, 1471.9}, {1000, 218.0, 519.1}}}},
      {"REDDIT-MULTI-5K",
       {1,
        {{1000, 799.5, 2035.5},
         {1000, 852.1, 1940.4},
         {1000, 374.1, 856.5},
         {1000, 249.6, 534.0},
         {1000, 267.0, 581.7}}}},
  };
  const auto it = table.find(name);
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::optional<AttrSynthesis> tu_default_synthesis(const std::string& name) {
  if (name == "IMDB-BINARY") return AttrSynthesis::OneHotDegree;
  if (name == "REDDIT-BINARY" || name == "REDDIT-MULTI-5K") return AttrSynthesis::ConstantOne;
  return std::nullopt;
}

std::vector<std::string> check_against_reference(const Dataset& ds) {
  std::vector<std::string> issues;
  const auto ref = tu_reference_stats(ds.name);
  if (!ref) return issues;
  if (ds.attr_dim != ref->attr_dim)
    issues.push_back("attr_dim " + std::to_string(ds.attr_dim) + " != expected " +
                     std::to_string(ref->attr_dim));
  if (ds.class_ids.size() != ref->per_class.size()) {
    issues.push_back("class count " + std::to_string(ds.class_ids.size()) + " != expected " +
                     std::to_string(ref->per_class.size()));
    return issues;
  }
  for (std::size_t c = 0; c < ref->per_class.size(); ++c) {
    const int cls = ds.class_ids[c];
    long count = 0;
    double nodes = 0.0, edges = 0.0;
    for (const auto& g : ds.graphs) {
      if (g.label != cls) continue;
      count++;
      nodes += g.num_nodes;
      edges += static_cast<double>(g.edges.size());
    }
    const auto& want = ref->per_class[c];
    const auto tag = "class " + std::to_string(cls) + ": ";
    if (count != want.num_graphs)
      issues.push_back(tag + "graph count " + std::to_string(count) + " != " +
                       std::to_string(want.num_graphs));
    if (count > 0) {
      const double avg_n = nodes / static_cast<double>(count);
      const double avg_e = edges / static_cast<double>(count);
      if (std::abs(avg_n - want.avg_nodes) > 0.1 + 1e-9)
        issues.push_back(tag + "avg nodes " + std::to_string(avg_n) + " != " +
                         std::to_string(want.avg_nodes));
      if (std::abs(avg_e - want.avg_edges) > 0.1 + 1e-9)
        issues.push_back(tag + "avg edges " + std::to_string(avg_e) + " != " +
                         std::to_string(want.avg_edges));
    }
  }
  return issues;
}

}  // namespace graphad
