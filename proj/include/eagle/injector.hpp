#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eagle/hetgraph.hpp"

namespace eagle {

// Parameters of the synthetic heterogeneous graph generator. Communities
// are latent: nodes of every type are assigned one, attributes are drawn
// around a per-(type, community) center, and edges are biased
// intra-community.
struct SynthSchema {
  struct NodeTypeSpec {
    std::string name;
    std::size_t count = 1;
    std::size_t attr_dim = 16;
  };
  struct EdgeTypeSpec {
    std::string name;
    std::string src;
    std::string dst;
    double mean_out_degree = 1.0;
  };

  std::vector<NodeTypeSpec> node_types;
  std::vector<EdgeTypeSpec> edge_types;
  std::size_t communities = 4;
  // 1 = every same-community row identical, 0 = pure noise.
  double coherence = 0.85;
  double edge_homophily = 0.9;
};

HetGraph generate_synthetic(const SynthSchema& schema, std::uint64_t seed);

// Bookkeeping of one injection run, sufficient for exact replay.
struct InjectionRecord {
  struct Entry {
    std::size_t target;
    std::size_t source;                  // candidate whose row was copied
    std::vector<std::size_t> candidates; // the k sampled candidates
  };
  NodeTypeId target_type = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<Entry> entries;
};

struct InjectionResult {
  HetGraph graph;
  InjectionRecord record;
};

// Contextual anomaly injection: each target's attribute row is replaced by
// the row of the farthest (Euclidean) of k uniformly sampled same-type
// candidates. The input graph is never mutated.
InjectionResult inject_contextual(const HetGraph& graph, NodeTypeId target_type,
                                  std::size_t count, std::size_t k,
                                  std::uint64_t seed);

std::vector<int> injection_labels(const InjectionRecord& record,
                                  std::size_t node_count);

}  // namespace eagle
