#pragma once

#include <cstdint>
#include <vector>

#include "eagle/hetgraph.hpp"

namespace eagle {

enum class PairPolarity { Positive, Negative };

// One contrastive sample: a target node against a meta-path instance.
// Positive: target is a member. Negative: target is not a member, but at
// least one member is a direct neighbor of the target.
struct InstancePair {
  TypedNode target;
  InstanceNodeSet members;
  PairPolarity polarity = PairPolarity::Positive;
  std::size_t path_id = 0;

  friend bool operator==(const InstancePair&, const InstancePair&) = default;
};

inline constexpr std::size_t kNegativeRejectionCap = 50;

std::vector<InstancePair> sample_positive(const HetGraph& graph,
                                          const TypedNode& target,
                                          const std::vector<MetaPath>& paths,
                                          std::size_t n, std::uint64_t seed);

std::vector<InstancePair> sample_negative(const HetGraph& graph,
                                          const TypedNode& target,
                                          const std::vector<MetaPath>& paths,
                                          std::size_t n, std::uint64_t seed);

}  // namespace eagle
