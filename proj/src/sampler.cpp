#include "eagle/sampler.hpp"

#include <algorithm>

namespace eagle {

namespace {

bool contains(const InstanceNodeSet& set, const TypedNode& node) {
  return std::binary_search(set.begin(), set.end(), node);
}

}  // namespace

std::vector<InstancePair> sample_positive(const HetGraph& graph,
                                          const TypedNode& target,
                                          const std::vector<MetaPath>& paths,
                                          std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_positive: n must be >= 1");
  if (target.index >= graph.node_count(target.type)) {
    throw DataError("sample_positive: target out of range");
  }
  Rng rng(seed);
  // Round-robin across paths until n pairs are collected or every path is
  // exhausted.
  std::vector<std::vector<InstanceNodeSet>> pools(paths.size());
  for (std::size_t p = 0; p < paths.size(); ++p) {
    pools[p] = metapath_instances(graph, paths[p], target, n,
                                  rng.fork(p).next_u64());
  }
  std::vector<InstancePair> out;
  std::vector<std::size_t> cursor(paths.size(), 0);
  bool progressed = true;
  while (out.size() < n && progressed) {
    progressed = false;
    for (std::size_t p = 0; p < paths.size() && out.size() < n; ++p) {
      if (cursor[p] < pools[p].size()) {
        out.push_back({target, pools[p][cursor[p]], PairPolarity::Positive, p});
        ++cursor[p];
        progressed = true;
      }
    }
  }
  return out;
}

std::vector<InstancePair> sample_negative(const HetGraph& graph,
                                          const TypedNode& target,
                                          const std::vector<MetaPath>& paths,
                                          std::size_t n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_negative: n must be >= 1");
  if (target.index >= graph.node_count(target.type)) {
    throw DataError("sample_negative: target out of range");
  }
  const std::vector<TypedNode> neighbors = graph.direct_neighbors(target);
  if (neighbors.empty()) return {};

  Rng rng(seed);
  std::vector<InstancePair> out;
  for (std::size_t want = 0; want < n; ++want) {
    bool found = false;
    for (std::size_t attempt = 0;
         attempt < kNegativeRejectionCap && !found; ++attempt) {
      // Rotate the template on every retry so one negative-free path cannot
      // exhaust the attempt budget.
      const std::size_t path_id = (want + attempt) % paths.size();
      const MetaPath& path = paths[path_id];
      const TypedNode& anchor =
          neighbors[rng.uniform_index(neighbors.size())];
      // Anchor must appear somewhere on the path template.
      if (std::find(path.types.begin(), path.types.end(), anchor.type) ==
          path.types.end()) {
        continue;
      }
      auto instances =
          metapath_instances(graph, path, anchor, 4, rng.next_u64());
      if (instances.empty()) continue;
      rng.shuffle(instances);
      for (auto& inst : instances) {
        if (contains(inst, target)) continue;
        out.push_back(
            {target, std::move(inst), PairPolarity::Negative, path_id});
        found = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace eagle
