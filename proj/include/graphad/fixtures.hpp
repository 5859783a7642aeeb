#pragma once

#include <filesystem>

#include "graphad/graph.hpp"

namespace graphad {

// Deterministic synthetic two-class dataset for tests, verification and the
// desk-scale benchmark. Class 0: sparse random graphs with centered
// attributes. Class 1: denser and larger graphs with shifted attributes, so
// both structure and attribute pooling carry signal.
Dataset make_fixture_dataset(int graphs_per_class = 60, int attr_dim = 4,
                             std::uint64_t seed = 7);

// Writes a dataset to `dir` in the TU text format (round-trips through
// load_tu_dataset up to attribute float formatting).
void write_tu_format(const Dataset& ds, const std::filesystem::path& dir);

// Random small graph with symmetric edges, for property tests.
Graph random_graph(class Rng& rng, int min_nodes, int max_nodes, int attr_dim,
                   double edge_prob = 0.3);

}  // namespace graphad
