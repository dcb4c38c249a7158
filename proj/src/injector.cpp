#include "eagle/injector.hpp"

#include <algorithm>
#include <cmath>

namespace eagle {

HetGraph generate_synthetic(const SynthSchema& schema, std::uint64_t seed) {
  if (schema.communities == 0) throw ConfigError("communities must be >= 1");
  if (schema.coherence < 0.0 || schema.coherence > 1.0) {
    throw ConfigError("coherence must lie in [0, 1]");
  }
  if (schema.node_types.empty()) throw ConfigError("no node types configured");
  for (const auto& nt : schema.node_types) {
    if (nt.count < 1) throw ConfigError("node type sizes must be >= 1");
  }

  Schema s;
  for (const auto& nt : schema.node_types) s.add_node_type(nt.name);
  std::vector<std::size_t> counts;
  for (const auto& nt : schema.node_types) counts.push_back(nt.count);
  for (const auto& et : schema.edge_types) {
    s.add_edge_type(et.name, s.node_type(et.src), s.node_type(et.dst));
  }
  HetGraph graph(std::move(s), std::move(counts));

  Rng root(seed);

  // Community assignment per node, round-robin so every community is
  // populated, then shuffled.
  std::vector<std::vector<std::size_t>> community(schema.node_types.size());
  {
    Rng rng = root.fork(1);
    for (std::size_t t = 0; t < schema.node_types.size(); ++t) {
      auto& c = community[t];
      c.resize(schema.node_types[t].count);
      for (std::size_t i = 0; i < c.size(); ++i) c[i] = i % schema.communities;
      rng.shuffle(c);
    }
  }

  // Attributes: per-(type, community) center plus noise scaled by
  // (1 - coherence).
  {
    Rng rng = root.fork(2);
    for (std::size_t t = 0; t < schema.node_types.size(); ++t) {
      const std::size_t dim = schema.node_types[t].attr_dim;
      DenseMatrix centers(schema.communities, dim);
      for (double& v : centers.values()) v = rng.normal();
      DenseMatrix attrs(schema.node_types[t].count, dim);
      const double noise = 1.0 - schema.coherence;
      for (std::size_t i = 0; i < attrs.rows(); ++i) {
        const auto center = centers.row(community[t][i]);
        auto row = attrs.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
          row[j] = center[j] + noise * rng.normal();
        }
      }
      graph.set_attributes(static_cast<NodeTypeId>(t), std::move(attrs));
    }
  }

  // Edges: per-source degree around mean_out_degree, destination drawn
  // intra-community with probability edge_homophily.
  {
    Rng rng = root.fork(3);
    for (std::size_t e = 0; e < schema.edge_types.size(); ++e) {
      const auto& et = schema.edge_types[e];
      const NodeTypeId src_t = graph.schema().node_type(et.src);
      const NodeTypeId dst_t = graph.schema().node_type(et.dst);
      const std::size_t n_dst = graph.node_count(dst_t);

      // Destination nodes grouped by community for biased draws.
      std::vector<std::vector<std::size_t>> by_comm(schema.communities);
      for (std::size_t j = 0; j < n_dst; ++j) {
        by_comm[community[dst_t][j]].push_back(j);
      }

      const std::size_t base = static_cast<std::size_t>(et.mean_out_degree);
      const double frac = et.mean_out_degree - static_cast<double>(base);
      for (std::size_t i = 0; i < graph.node_count(src_t); ++i) {
        std::size_t degree = base + (rng.bernoulli(frac) ? 1 : 0);
        std::vector<std::size_t> chosen;
        for (std::size_t d = 0; d < degree; ++d) {
          const auto& pool = by_comm[community[src_t][i]];
          std::size_t j;
          if (!pool.empty() && rng.bernoulli(schema.edge_homophily)) {
            j = pool[rng.uniform_index(pool.size())];
          } else {
            j = rng.uniform_index(n_dst);
          }
          if (std::find(chosen.begin(), chosen.end(), j) == chosen.end()) {
            chosen.push_back(j);
            graph.add_edge(static_cast<EdgeTypeId>(e), i, j);
          }
        }
      }
    }
  }

  graph.finalize();
  return graph;
}

namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

InjectionResult inject_contextual(const HetGraph& graph, NodeTypeId target_type,
                                  std::size_t count, std::size_t k,
                                  std::uint64_t seed) {
  if (k < 1) throw ConfigError("k must be >= 1");
  const std::size_t n = graph.node_count(target_type);
  if (count > n) throw ConfigError("anomaly count exceeds node population");

  Rng rng(seed);

  // Distinct targets.
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  rng.shuffle(all);
  std::vector<std::size_t> targets(all.begin(), all.begin() + count);

  std::vector<char> is_anomalous(n, 0);
  for (std::size_t t : targets) is_anomalous[t] = 1;

  // Distances are measured against the clean attribute matrix so earlier
  // injections never leak into later ones.
  const DenseMatrix& clean = graph.attributes(target_type);
  DenseMatrix attrs = clean;

  InjectionRecord record;
  record.target_type = target_type;
  record.k = k;
  record.seed = seed;

  for (std::size_t target : targets) {
    // k candidates without replacement, excluding the target and every
    // injected node.
    std::vector<std::size_t> eligible;
    eligible.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i != target && !is_anomalous[i]) eligible.push_back(i);
    }
    if (eligible.empty()) {
      throw ConfigError("no eligible candidate nodes for injection");
    }
    rng.shuffle(eligible);
    const std::size_t take = std::min(k, eligible.size());
    std::vector<std::size_t> candidates(eligible.begin(),
                                        eligible.begin() + take);

    std::size_t best = candidates[0];
    double best_dist = sq_distance(clean.row(target), clean.row(best));
    for (std::size_t c : candidates) {
      const double d = sq_distance(clean.row(target), clean.row(c));
      // Ties break toward the lowest candidate index.
      if (d > best_dist || (d == best_dist && c < best)) {
        best = c;
        best_dist = d;
      }
    }
    auto dst = attrs.row(target);
    const auto src = clean.row(best);
    std::copy(src.begin(), src.end(), dst.begin());
    record.entries.push_back({target, best, std::move(candidates)});
  }

  // Rebuild the clone around the mutated attribute matrix.
  HetGraph out(graph.schema(), [&] {
    std::vector<std::size_t> counts;
    for (NodeTypeId t = 0; t < graph.schema().node_type_count(); ++t) {
      counts.push_back(graph.node_count(t));
    }
    return counts;
  }());
  for (EdgeTypeId e = 0; e < graph.schema().edge_type_count(); ++e) {
    for (const auto& [u, v] : graph.edges(e)) out.add_edge(e, u, v);
  }
  for (NodeTypeId t = 0; t < graph.schema().node_type_count(); ++t) {
    out.set_attributes(t, t == target_type ? attrs : graph.attributes(t));
    for (std::size_t i = 0; i < graph.node_count(t); ++i) {
      out.set_node_name(t, i, graph.node_name(t, i));
    }
  }
  out.finalize();
  return {std::move(out), std::move(record)};
}

std::vector<int> injection_labels(const InjectionRecord& record,
                                  std::size_t node_count) {
  std::vector<int> labels(node_count, 0);
  for (const auto& e : record.entries) labels.at(e.target) = 1;
  return labels;
}

}  // namespace eagle
