#pragma once

#include <cstdint>
#include <vector>

#include "graphad/graph.hpp"

namespace graphad {

// One fold of one experimental variant: the designated normal class supplies
// train/val and the fold's test normals; every other class contributes its
// fold slice as test anomalies.
struct VariantSplit {
  int normal_class = 0;
  int fold = 0;
  std::vector<int> train_idx;
  std::vector<int> val_idx;
  std::vector<int> test_idx;
  std::vector<int> test_labels;  // 0 = normal, 1 = anomaly, aligned with test_idx
};

inline constexpr int kFoldCount = 10;

// Shuffles each class once with `seed`, partitions it into 10 contiguous
// slices, and rotates slice i into the test set of fold i. The remaining
// normal pool is split 90/10 into train/val. Throws DataError when any
// class has fewer than 10 members.
std::vector<VariantSplit> make_variant_splits(const Dataset& ds, int normal_class,
                                              std::uint64_t seed);

// Aborts (throws) unless train/val/test are pairwise disjoint, in range and
// test labels match the variant definition.
void validate_split(const VariantSplit& split, const Dataset& ds);

std::vector<Graph> select_graphs(const Dataset& ds, const std::vector<int>& idx);

}  // namespace graphad
