#include "eagle/hetgraph.hpp"

#include <algorithm>
#include <set>

#include "eagle/linalg.hpp"

namespace eagle {

NodeTypeId Schema::add_node_type(const std::string& name) {
  for (const auto& existing : node_type_names_) {
    if (existing == name) throw SchemaError("duplicate node type: " + name);
  }
  node_type_names_.push_back(name);
  return static_cast<NodeTypeId>(node_type_names_.size() - 1);
}

EdgeTypeId Schema::add_edge_type(const std::string& name, NodeTypeId src,
                                 NodeTypeId dst) {
  for (const auto& existing : edge_type_names_) {
    if (existing == name) throw SchemaError("duplicate edge type: " + name);
  }
  if (src >= node_type_count() || dst >= node_type_count()) {
    throw SchemaError("edge type " + name + " references unknown node type");
  }
  edge_type_names_.push_back(name);
  edge_endpoints_.emplace_back(src, dst);
  return static_cast<EdgeTypeId>(edge_type_names_.size() - 1);
}

const std::string& Schema::node_type_name(NodeTypeId t) const {
  if (t >= node_type_count()) throw SchemaError("unknown node type id");
  return node_type_names_[t];
}

const std::string& Schema::edge_type_name(EdgeTypeId t) const {
  if (t >= edge_type_count()) throw SchemaError("unknown edge type id");
  return edge_type_names_[t];
}

NodeTypeId Schema::node_type(const std::string& name) const {
  for (std::size_t i = 0; i < node_type_names_.size(); ++i) {
    if (node_type_names_[i] == name) return static_cast<NodeTypeId>(i);
  }
  throw SchemaError("unknown node type: " + name);
}

bool Schema::has_node_type(const std::string& name) const {
  return std::find(node_type_names_.begin(), node_type_names_.end(), name) !=
         node_type_names_.end();
}

EdgeTypeId Schema::edge_type(const std::string& name) const {
  for (std::size_t i = 0; i < edge_type_names_.size(); ++i) {
    if (edge_type_names_[i] == name) return static_cast<EdgeTypeId>(i);
  }
  throw SchemaError("unknown edge type: " + name);
}

NodeTypeId Schema::edge_src(EdgeTypeId t) const {
  if (t >= edge_type_count()) throw SchemaError("unknown edge type id");
  return edge_endpoints_[t].first;
}

NodeTypeId Schema::edge_dst(EdgeTypeId t) const {
  if (t >= edge_type_count()) throw SchemaError("unknown edge type id");
  return edge_endpoints_[t].second;
}

std::uint64_t Schema::hash() const {
  // FNV-1a over the type tables.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  for (const auto& n : node_type_names_) mix(n);
  for (std::size_t i = 0; i < edge_type_names_.size(); ++i) {
    mix(edge_type_names_[i]);
    h ^= edge_endpoints_[i].first;
    h *= 1099511628211ULL;
    h ^= edge_endpoints_[i].second;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

bool step_registered(const Schema& schema, NodeTypeId a, NodeTypeId b) {
  for (EdgeTypeId e = 0; e < schema.edge_type_count(); ++e) {
    if ((schema.edge_src(e) == a && schema.edge_dst(e) == b) ||
        (schema.edge_src(e) == b && schema.edge_dst(e) == a)) {
      return true;
    }
  }
  return false;
}

}  // namespace

MetaPath make_metapath(const Schema& schema,
                       const std::vector<std::string>& type_names) {
  if (type_names.size() < 3) {
    throw SchemaError("meta-path must have at least 3 node types");
  }
  MetaPath path;
  for (const auto& name : type_names) path.types.push_back(schema.node_type(name));
  for (std::size_t i = 0; i + 1 < path.types.size(); ++i) {
    if (!step_registered(schema, path.types[i], path.types[i + 1])) {
      throw SchemaError("no edge type connects " + type_names[i] + " and " +
                        type_names[i + 1]);
    }
  }
  return path;
}

HetGraph::HetGraph(Schema schema, std::vector<std::size_t> node_counts)
    : schema_(std::move(schema)), node_counts_(std::move(node_counts)) {
  if (node_counts_.size() != schema_.node_type_count()) {
    throw SchemaError("node count list does not match schema");
  }
  edges_.resize(schema_.edge_type_count());
  attrs_.resize(schema_.node_type_count());
  node_names_.resize(schema_.node_type_count());
  for (NodeTypeId t = 0; t < schema_.node_type_count(); ++t) {
    node_names_[t].resize(node_counts_[t]);
  }
}

std::size_t HetGraph::total_node_count() const {
  std::size_t n = 0;
  for (std::size_t c : node_counts_) n += c;
  return n;
}

std::size_t HetGraph::total_edge_count() const {
  std::size_t n = 0;
  for (const auto& e : edges_) n += e.size();
  return n;
}

void HetGraph::add_edge(EdgeTypeId type, std::size_t src, std::size_t dst) {
  if (finalized_) throw DataError("graph is finalized");
  if (type >= schema_.edge_type_count()) throw SchemaError("unknown edge type");
  if (src >= node_counts_[schema_.edge_src(type)] ||
      dst >= node_counts_[schema_.edge_dst(type)]) {
    throw DataError("edge endpoint out of range for type " +
                    schema_.edge_type_name(type));
  }
  edges_[type].emplace_back(src, dst);
}

void HetGraph::set_attributes(NodeTypeId type, DenseMatrix attrs) {
  if (finalized_) throw DataError("graph is finalized");
  if (type >= schema_.node_type_count()) throw SchemaError("unknown node type");
  if (attrs.rows() != node_counts_[type]) {
    throw DataError("attribute row count does not match node count of " +
                    schema_.node_type_name(type));
  }
  attrs_[type] = std::move(attrs);
}

const DenseMatrix& HetGraph::attributes(NodeTypeId type) const {
  if (type >= schema_.node_type_count()) throw SchemaError("unknown node type");
  return attrs_[type];
}

void HetGraph::set_node_name(NodeTypeId type, std::size_t index,
                             std::string name) {
  if (finalized_) throw DataError("graph is finalized");
  node_names_.at(type).at(index) = std::move(name);
}

void HetGraph::finalize() {
  if (finalized_) return;
  if (schema_.node_type_count() + schema_.edge_type_count() <= 2) {
    throw SchemaError("heterogeneous graph needs |node types| + |edge types| > 2");
  }
  const std::size_t T = schema_.node_type_count();
  // Default node names where none were assigned.
  for (NodeTypeId t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < node_counts_[t]; ++i) {
      if (node_names_[t][i].empty()) {
        node_names_[t][i] = schema_.node_type_name(t) + std::to_string(i);
      }
    }
    if (attrs_[t].rows() == 0 && node_counts_[t] > 0) {
      attrs_[t] = DenseMatrix(node_counts_[t], 1);
    }
  }

  step_adj_.assign(T * T, {});
  for (NodeTypeId a = 0; a < T; ++a) {
    for (NodeTypeId b = 0; b < T; ++b) {
      step_adj_[a * T + b].resize(node_counts_[a]);
    }
  }
  direct_adj_.assign(T, {});
  for (NodeTypeId t = 0; t < T; ++t) direct_adj_[t].resize(node_counts_[t]);

  for (EdgeTypeId e = 0; e < schema_.edge_type_count(); ++e) {
    const NodeTypeId s = schema_.edge_src(e);
    const NodeTypeId d = schema_.edge_dst(e);
    for (const auto& [u, v] : edges_[e]) {
      step_adj_[s * T + d][u].push_back(v);
      step_adj_[d * T + s][v].push_back(u);
      direct_adj_[s][u].push_back({d, v});
      direct_adj_[d][v].push_back({s, u});
    }
  }
  auto dedup = [](auto& lists) {
    for (auto& l : lists) {
      std::sort(l.begin(), l.end());
      l.erase(std::unique(l.begin(), l.end()), l.end());
    }
  };
  for (auto& pair_lists : step_adj_) dedup(pair_lists);
  for (auto& type_lists : direct_adj_) dedup(type_lists);
  finalized_ = true;
}

void HetGraph::require_finalized() const {
  if (!finalized_) throw DataError("graph not finalized");
}

std::vector<TypedNode> HetGraph::direct_neighbors(const TypedNode& node) const {
  require_finalized();
  if (node.type >= schema_.node_type_count() ||
      node.index >= node_counts_[node.type]) {
    throw DataError("node out of range");
  }
  return direct_adj_[node.type][node.index];
}

const std::vector<std::vector<std::size_t>>& HetGraph::step_neighbors(
    NodeTypeId from_type, NodeTypeId to_type) const {
  require_finalized();
  return step_adj_[from_type * schema_.node_type_count() + to_type];
}

SparseMatrix typed_adjacency(const HetGraph& graph, EdgeTypeId edge_type) {
  if (edge_type >= graph.schema().edge_type_count()) {
    throw SchemaError("unknown edge type");
  }
  const std::size_t rows =
      graph.node_count(graph.schema().edge_src(edge_type));
  const std::size_t cols =
      graph.node_count(graph.schema().edge_dst(edge_type));
  std::vector<Triplet> entries;
  entries.reserve(graph.edges(edge_type).size());
  for (const auto& [u, v] : graph.edges(edge_type)) {
    entries.push_back({u, v, 1.0});
  }
  // Parallel edges collapse to 1.
  SparseMatrix m = SparseMatrix::from_triplets(rows, cols, std::move(entries));
  std::vector<Triplet> binary;
  binary.reserve(m.nnz());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j : m.row_cols(i)) binary.push_back({i, j, 1.0});
  }
  return SparseMatrix::from_triplets(rows, cols, std::move(binary));
}

namespace {

SparseMatrix step_matrix(const HetGraph& graph, NodeTypeId a, NodeTypeId b) {
  if (!step_registered(graph.schema(), a, b)) {
    throw SchemaError("no edge type connects " +
                      graph.schema().node_type_name(a) + " and " +
                      graph.schema().node_type_name(b));
  }
  const auto& lists = graph.step_neighbors(a, b);
  std::vector<Triplet> entries;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t j : lists[i]) entries.push_back({i, j, 1.0});
  }
  return SparseMatrix::from_triplets(graph.node_count(a), graph.node_count(b),
                                     std::move(entries));
}

}  // namespace

SparseMatrix metapath_adjacency(const HetGraph& graph, const MetaPath& path) {
  if (path.start_type() != path.end_type()) {
    throw SchemaError("meta-path must start and end on the same node type");
  }
  SparseMatrix acc = step_matrix(graph, path.types[0], path.types[1]);
  for (std::size_t i = 1; i + 1 < path.types.size(); ++i) {
    acc = bool_spgemm(acc, step_matrix(graph, path.types[i], path.types[i + 1]));
  }
  // Self is always a meta-path neighbor.
  const std::size_t n = graph.node_count(path.start_type());
  std::vector<Triplet> entries;
  entries.reserve(acc.nnz() + n);
  for (std::size_t i = 0; i < n; ++i) {
    bool has_diag = false;
    for (std::size_t j : acc.row_cols(i)) {
      entries.push_back({i, j, 1.0});
      if (j == i) has_diag = true;
    }
    if (!has_diag) entries.push_back({i, i, 1.0});
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

std::vector<std::size_t> metapath_neighbors(const HetGraph& graph,
                                            const MetaPath& path,
                                            std::size_t node) {
  if (node >= graph.node_count(path.start_type())) {
    throw DataError("node index out of range");
  }
  const SparseMatrix adj = metapath_adjacency(graph, path);
  const auto cols = adj.row_cols(node);
  return {cols.begin(), cols.end()};
}

namespace {

InstanceNodeSet walk_to_set(const MetaPath& path,
                            const std::vector<std::size_t>& walk) {
  InstanceNodeSet set;
  set.reserve(walk.size());
  for (std::size_t i = 0; i < walk.size(); ++i) {
    set.push_back({path.types[i], walk[i]});
  }
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

bool degenerate_walk(const MetaPath& path,
                     const std::vector<std::size_t>& walk) {
  return path.start_type() == path.end_type() && walk.front() == walk.back();
}

// Enumerate every walk with walk[pos] fixed, extending right then left.
void enumerate_from(const HetGraph& graph, const MetaPath& path,
                    std::vector<std::size_t>& walk, std::size_t pos,
                    std::size_t right, std::size_t left,
                    std::set<InstanceNodeSet>& out) {
  const std::size_t last = path.types.size() - 1;
  if (right < last) {
    const auto& nbrs =
        graph.step_neighbors(path.types[right], path.types[right + 1]);
    for (std::size_t v : nbrs[walk[right]]) {
      walk[right + 1] = v;
      enumerate_from(graph, path, walk, pos, right + 1, left, out);
    }
    return;
  }
  if (left > 0) {
    const auto& nbrs =
        graph.step_neighbors(path.types[left], path.types[left - 1]);
    for (std::size_t v : nbrs[walk[left]]) {
      walk[left - 1] = v;
      enumerate_from(graph, path, walk, pos, right, left - 1, out);
    }
    return;
  }
  if (!degenerate_walk(path, walk)) out.insert(walk_to_set(path, walk));
}

// One seeded random walk with the anchor at `pos`; empty when stuck.
bool random_walk_from(const HetGraph& graph, const MetaPath& path,
                      std::size_t pos, std::size_t anchor, Rng& rng,
                      std::vector<std::size_t>& walk) {
  walk[pos] = anchor;
  for (std::size_t i = pos; i + 1 < path.types.size(); ++i) {
    const auto& nbrs = graph.step_neighbors(path.types[i], path.types[i + 1]);
    const auto& cand = nbrs[walk[i]];
    if (cand.empty()) return false;
    walk[i + 1] = cand[rng.uniform_index(cand.size())];
  }
  for (std::size_t i = pos; i > 0; --i) {
    const auto& nbrs = graph.step_neighbors(path.types[i], path.types[i - 1]);
    const auto& cand = nbrs[walk[i]];
    if (cand.empty()) return false;
    walk[i - 1] = cand[rng.uniform_index(cand.size())];
  }
  return !degenerate_walk(path, walk);
}

}  // namespace

std::vector<InstanceNodeSet> metapath_instances(const HetGraph& graph,
                                                const MetaPath& path,
                                                const TypedNode& anchor,
                                                std::size_t max_count,
                                                std::uint64_t rng_seed) {
  if (max_count < 1) throw ConfigError("max_count must be >= 1");
  if (anchor.index >= graph.node_count(anchor.type)) {
    throw DataError("anchor out of range");
  }
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < path.types.size(); ++i) {
    if (path.types[i] == anchor.type) positions.push_back(i);
  }
  if (positions.empty()) return {};

  Rng rng(rng_seed);
  std::set<InstanceNodeSet> unique;

  if (graph.node_count(path.start_type()) < kInstanceEnumerationThreshold) {
    std::vector<std::size_t> walk(path.types.size());
    for (std::size_t pos : positions) {
      walk[pos] = anchor.index;
      enumerate_from(graph, path, walk, pos, pos, pos, unique);
    }
    std::vector<InstanceNodeSet> all(unique.begin(), unique.end());
    if (all.size() <= max_count) return all;
    rng.shuffle(all);
    all.resize(max_count);
    return all;
  }

  // Large start type: seeded random walks, deduplicated.
  std::vector<std::size_t> walk(path.types.size());
  const std::size_t attempts = max_count * 20 + 20;
  for (std::size_t a = 0; a < attempts && unique.size() < max_count; ++a) {
    const std::size_t pos = positions[rng.uniform_index(positions.size())];
    if (random_walk_from(graph, path, pos, anchor.index, rng, walk)) {
      unique.insert(walk_to_set(path, walk));
    }
  }
  return {unique.begin(), unique.end()};
}

}  // namespace eagle
