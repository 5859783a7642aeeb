#pragma once

#include <array>
#include <cstdint>

#include "graphad/graph.hpp"

namespace graphad {

enum class TransformKind { Identity, NodeDrop, EdgeAdd, EdgeDrop, AttrMask, Subgraph };

constexpr std::array<TransformKind, 6> kGtpTransforms = {
    TransformKind::Identity, TransformKind::NodeDrop,  TransformKind::EdgeAdd,
    TransformKind::EdgeDrop, TransformKind::AttrMask, TransformKind::Subgraph};

struct TransformSpec {
  TransformKind kind = TransformKind::Identity;
  double ratio = 0.2;  // in (0,1); ignored by identity
  std::uint64_t rng_seed = 0;
};

const char* transform_name(TransformKind kind);

// Applies one structural/attribute transformation. All randomness comes from
// spec.rng_seed; outputs always satisfy the Graph invariants and keep at
// least one node.
Graph apply_transform(const Graph& g, const TransformSpec& spec);

}  // namespace graphad
