#include "graphad/splits.hpp"

#include <algorithm>
#include <set>

#include "graphad/rng.hpp"

namespace graphad {

std::vector<VariantSplit> make_variant_splits(const Dataset& ds, int normal_class,
                                              std::uint64_t seed) {
  if (!std::binary_search(ds.class_ids.begin(), ds.class_ids.end(), normal_class))
    throw DataError("normal class " + std::to_string(normal_class) + " not present in dataset '" +
                    ds.name + "'");

  // One shuffled order per class, shared by all folds.
  std::vector<std::vector<int>> class_members(ds.class_ids.size());
  for (std::size_t i = 0; i < ds.graphs.size(); ++i) {
    const auto it =
        std::lower_bound(ds.class_ids.begin(), ds.class_ids.end(), ds.graphs[i].label);
    class_members[static_cast<std::size_t>(it - ds.class_ids.begin())].push_back(
        static_cast<int>(i));
  }
  for (std::size_t c = 0; c < class_members.size(); ++c) {
    if (static_cast<int>(class_members[c].size()) < kFoldCount)
      throw DataError("protocol error: class " + std::to_string(ds.class_ids[c]) + " has only " +
                      std::to_string(class_members[c].size()) + " members (< 10)");
    Rng rng(mix_seed({seed, 0x73706c6974ULL, static_cast<std::uint64_t>(ds.class_ids[c])}));
    rng.shuffle(class_members[c]);
  }

  const auto slice = [](const std::vector<int>& v, int fold) {
    const auto m = v.size();
    const auto lo = m * static_cast<std::size_t>(fold) / kFoldCount;
    const auto hi = m * (static_cast<std::size_t>(fold) + 1) / kFoldCount;
    return std::vector<int>(v.begin() + static_cast<long>(lo), v.begin() + static_cast<long>(hi));
  };

  const std::size_t normal_pos = static_cast<std::size_t>(
      std::lower_bound(ds.class_ids.begin(), ds.class_ids.end(), normal_class) -
      ds.class_ids.begin());

  std::vector<VariantSplit> folds;
  folds.reserve(kFoldCount);
  for (int fold = 0; fold < kFoldCount; ++fold) {
    VariantSplit s;
    s.normal_class = normal_class;
    s.fold = fold;

    const auto test_normals = slice(class_members[normal_pos], fold);
    std::set<int> in_test_normal(test_normals.begin(), test_normals.end());
    for (int idx : test_normals) {
      s.test_idx.push_back(idx);
      s.test_labels.push_back(0);
    }
    for (std::size_t c = 0; c < class_members.size(); ++c) {
      if (c == normal_pos) continue;
      for (int idx : slice(class_members[c], fold)) {
        s.test_idx.push_back(idx);
        s.test_labels.push_back(1);
      }
    }

    std::vector<int> remaining;
    remaining.reserve(class_members[normal_pos].size() - test_normals.size());
    for (int idx : class_members[normal_pos])
      if (!in_test_normal.count(idx)) remaining.push_back(idx);
    const std::size_t n_val = remaining.size() / 10;
    s.val_idx.assign(remaining.begin(), remaining.begin() + static_cast<long>(n_val));
    s.train_idx.assign(remaining.begin() + static_cast<long>(n_val), remaining.end());

    validate_split(s, ds);
    folds.push_back(std::move(s));
  }
  return folds;
}

void validate_split(const VariantSplit& split, const Dataset& ds) {
  const int n = static_cast<int>(ds.graphs.size());
  std::set<int> seen;
  const auto check_set = [&](const std::vector<int>& idx, const char* what) {
    for (int i : idx) {
      if (i < 0 || i >= n) throw DataError(std::string("split index out of range in ") + what);
      if (!seen.insert(i).second)
        throw DataError(std::string("split sets overlap at index ") + std::to_string(i));
    }
  };
  check_set(split.train_idx, "train");
  check_set(split.val_idx, "val");
  check_set(split.test_idx, "test");
  if (split.test_idx.size() != split.test_labels.size())
    throw DataError("test label count mismatch");
  for (std::size_t i = 0; i < split.test_idx.size(); ++i) {
    const bool is_normal = ds.graphs[static_cast<std::size_t>(split.test_idx[i])].label ==
                           split.normal_class;
    if (is_normal != (split.test_labels[i] == 0))
      throw DataError("test label inconsistent with variant definition");
  }
  for (int i : split.train_idx)
    if (ds.graphs[static_cast<std::size_t>(i)].label != split.normal_class)
      throw DataError("anomalous sample leaked into the training set");
  for (int i : split.val_idx)
    if (ds.graphs[static_cast<std::size_t>(i)].label != split.normal_class)
      throw DataError("anomalous sample leaked into the validation set");
}

std::vector<Graph> select_graphs(const Dataset& ds, const std::vector<int>& idx) {
  std::vector<Graph> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(ds.graphs[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace graphad
