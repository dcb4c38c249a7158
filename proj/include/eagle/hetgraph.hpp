#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eagle/dense.hpp"
#include "eagle/errors.hpp"
#include "eagle/rng.hpp"
#include "eagle/sparse.hpp"

namespace eagle {

using NodeTypeId = std::uint32_t;
using EdgeTypeId = std::uint32_t;

// Registered node/edge type table. Every edge type declares the node types
// of its endpoints; names are unique per kind.
class Schema {
 public:
  NodeTypeId add_node_type(const std::string& name);
  EdgeTypeId add_edge_type(const std::string& name, NodeTypeId src,
                           NodeTypeId dst);

  std::size_t node_type_count() const { return node_type_names_.size(); }
  std::size_t edge_type_count() const { return edge_type_names_.size(); }

  const std::string& node_type_name(NodeTypeId t) const;
  const std::string& edge_type_name(EdgeTypeId t) const;
  NodeTypeId node_type(const std::string& name) const;
  EdgeTypeId edge_type(const std::string& name) const;
  bool has_node_type(const std::string& name) const;

  NodeTypeId edge_src(EdgeTypeId t) const;
  NodeTypeId edge_dst(EdgeTypeId t) const;

  // Stable content hash; checkpoints refuse to load against a different
  // schema.
  std::uint64_t hash() const;

 private:
  std::vector<std::string> node_type_names_;
  std::vector<std::string> edge_type_names_;
  std::vector<std::pair<NodeTypeId, NodeTypeId>> edge_endpoints_;
};

// Ordered node-type sequence; consecutive types must be connected by a
// registered edge type in either direction.
struct MetaPath {
  std::vector<NodeTypeId> types;

  std::size_t length() const { return types.size(); }
  NodeTypeId start_type() const { return types.front(); }
  NodeTypeId end_type() const { return types.back(); }
};

MetaPath make_metapath(const Schema& schema,
                       const std::vector<std::string>& type_names);

// A node identified by (type, within-type index).
struct TypedNode {
  NodeTypeId type;
  std::size_t index;

  friend bool operator==(const TypedNode&, const TypedNode&) = default;
  friend auto operator<=>(const TypedNode&, const TypedNode&) = default;
};

// The distinct nodes of one concrete meta-path walk.
using InstanceNodeSet = std::vector<TypedNode>;

// Typed nodes, typed edge lists and per-type attribute matrices. Immutable
// after construction; concurrent reads are safe.
class HetGraph {
 public:
  HetGraph(Schema schema, std::vector<std::size_t> node_counts);

  const Schema& schema() const { return schema_; }
  std::size_t node_count(NodeTypeId t) const { return node_counts_.at(t); }
  std::size_t total_node_count() const;
  std::size_t total_edge_count() const;

  void add_edge(EdgeTypeId type, std::size_t src, std::size_t dst);
  const std::vector<std::pair<std::size_t, std::size_t>>& edges(
      EdgeTypeId type) const {
    return edges_.at(type);
  }

  void set_attributes(NodeTypeId type, DenseMatrix attrs);
  const DenseMatrix& attributes(NodeTypeId type) const;

  void set_node_name(NodeTypeId type, std::size_t index, std::string name);
  const std::string& node_name(NodeTypeId type, std::size_t index) const {
    return node_names_[type][index];
  }

  // Call once after the last add_edge/set_attributes; validates the
  // |A|+|R| > 2 rule and attribute shapes, then freezes the graph.
  void finalize();
  bool finalized() const { return finalized_; }

  // Undirected 1-hop neighbors across every edge type.
  std::vector<TypedNode> direct_neighbors(const TypedNode& node) const;

  // Neighbor lists of one step from `from_type` to `to_type`, unioned over
  // all edge types connecting the pair in either direction.
  const std::vector<std::vector<std::size_t>>& step_neighbors(
      NodeTypeId from_type, NodeTypeId to_type) const;

 private:
  void require_finalized() const;

  Schema schema_;
  std::vector<std::size_t> node_counts_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> edges_;
  std::vector<DenseMatrix> attrs_;
  std::vector<std::vector<std::string>> node_names_;
  bool finalized_ = false;

  // [from_type * T + to_type] -> adjacency lists; built in finalize().
  std::vector<std::vector<std::vector<std::size_t>>> step_adj_;
  std::vector<std::vector<std::vector<TypedNode>>> direct_adj_;
};

SparseMatrix typed_adjacency(const HetGraph& graph, EdgeTypeId edge_type);

// Square binary matrix over the path's start type; entry (i,j) = 1 iff some
// concrete instance of the path connects i to j. Diagonal forced to 1.
SparseMatrix metapath_adjacency(const HetGraph& graph, const MetaPath& path);

std::vector<std::size_t> metapath_neighbors(const HetGraph& graph,
                                            const MetaPath& path,
                                            std::size_t node);

// Up to max_count concrete instances through `anchor` (anchor at any
// compatible position), uniform among the enumerable instances. Walks whose
// endpoints coincide are excluded.
std::vector<InstanceNodeSet> metapath_instances(const HetGraph& graph,
                                                const MetaPath& path,
                                                const TypedNode& anchor,
                                                std::size_t max_count,
                                                std::uint64_t rng_seed);

// Enumeration is exact below this many start-type nodes; larger graphs fall
// back to seeded random walks.
inline constexpr std::size_t kInstanceEnumerationThreshold = 1000;

}  // namespace eagle
