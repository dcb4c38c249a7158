#include "eagle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "eagle/sampler.hpp"

namespace eagle {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a,
                       std::uint64_t b = 0) {
  return Rng(seed).fork(a).fork(b).next_u64();
}

// Everything fixed per (config, graph) pair during training and scoring.
struct TrainingContext {
  const HetGraph* graph = nullptr;
  NodeTypeId score_type = 0;
  std::vector<MetaPath> paths;
  std::vector<NormalizedAdjacency> adjs;
  std::vector<DenseMatrix> adj_targets;  // dense binarized, diag 1
  const DenseMatrix* attrs = nullptr;
  std::size_t n = 0;
};

TrainingContext make_context(const RunConfig& config, const HetGraph& graph) {
  if (config.meta_paths.empty()) {
    throw ConfigError("no meta-paths configured");
  }
  TrainingContext ctx;
  ctx.graph = &graph;
  ctx.score_type = graph.schema().node_type(config.score_type);
  for (const auto& names : config.meta_paths) {
    MetaPath path = make_metapath(graph.schema(), names);
    if (path.start_type() != ctx.score_type ||
        path.end_type() != ctx.score_type) {
      throw ConfigError("meta-path must start and end on the scored type");
    }
    SparseMatrix adj = metapath_adjacency(graph, path);
    ctx.adjs.push_back(normalize_adjacency(adj));
    ctx.adj_targets.push_back(adj.to_dense());
    ctx.paths.push_back(std::move(path));
  }
  ctx.attrs = &graph.attributes(ctx.score_type);
  ctx.n = graph.node_count(ctx.score_type);
  if (ctx.attrs->rows() != ctx.n || ctx.attrs->cols() == 0) {
    throw DataError("scored node type has no attribute matrix");
  }
  return ctx;
}

// Projects an instance pair onto the scored type: members become scored-type
// row indices, the target excluded from positive pools. Pairs whose pool
// would be empty are dropped.
std::optional<ScoredPair> project_pair(const InstancePair& pair,
                                       NodeTypeId score_type) {
  ScoredPair out;
  out.target = pair.target.index;
  out.label = pair.polarity == PairPolarity::Positive ? 1.0 : 0.0;
  for (const auto& member : pair.members) {
    if (member.type != score_type) continue;
    if (pair.polarity == PairPolarity::Positive &&
        member.index == pair.target.index) {
      continue;
    }
    out.members.push_back(member.index);
  }
  if (out.members.empty()) return std::nullopt;
  return out;
}

std::vector<ScoredPair> sample_epoch_pairs(
    const TrainingContext& ctx, const RunConfig& config, std::uint64_t seed,
    std::size_t epoch, const std::vector<ScoredPair>& cached_positives) {
  std::vector<ScoredPair> pairs = cached_positives;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    const TypedNode target{ctx.score_type, i};
    const auto negs =
        sample_negative(*ctx.graph, target, ctx.paths, config.pairs_per_node,
                        mix_seed(seed, 0x4e, epoch * ctx.n + i));
    for (const auto& p : negs) {
      if (auto sp = project_pair(p, ctx.score_type)) {
        pairs.push_back(std::move(*sp));
      }
    }
  }
  return pairs;
}

std::vector<ScoredPair> sample_cached_positives(const TrainingContext& ctx,
                                                const RunConfig& config,
                                                std::uint64_t seed) {
  std::vector<ScoredPair> out;
  for (std::size_t i = 0; i < ctx.n; ++i) {
    const TypedNode target{ctx.score_type, i};
    const auto pos = sample_positive(*ctx.graph, target, ctx.paths,
                                     config.pairs_per_node,
                                     mix_seed(seed, 0x90, i));
    for (const auto& p : pos) {
      if (auto sp = project_pair(p, ctx.score_type)) {
        out.push_back(std::move(*sp));
      }
    }
  }
  return out;
}

double run_epoch(const TrainingContext& ctx, EagleParams& params,
                 AdamState& adam, const std::vector<ScoredPair>& pairs) {
  ForwardOutputs forward =
      eagle_forward(params, *ctx.attrs, ctx.adjs, pairs);
  const double l_gae =
      loss_gae(ctx.adj_targets, forward.struct_recon, *ctx.attrs,
               forward.attr_recon, params.hp.alpha, params.hp.beta);
  double l_con = 0.0;
  if (!pairs.empty()) {
    std::vector<double> labels;
    labels.reserve(pairs.size());
    for (const auto& p : pairs) labels.push_back(p.label);
    l_con = loss_contrastive(forward.pair_scores, labels);
  }
  const double loss = loss_total(l_gae, l_con, params.hp.gamma);
  if (!std::isfinite(loss)) {
    throw TrainingError("training diverged: non-finite loss");
  }
  EagleGradients grads = eagle_backward(params, forward, *ctx.attrs, ctx.adjs,
                                        ctx.adj_targets, pairs);
  auto p = params.trainable();
  auto g = grads.trainable();
  adam.step(p, g);
  return loss;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config JSON: ") + e.what());
  }
  RunConfig c = dblp_shaped_config();
  static const std::vector<std::string> known = {
      "score_type",     "meta_paths",      "alpha",
      "beta",           "gamma",           "embed_dim",
      "hidden_dim",     "readout",         "learning_rate",
      "lr_profile",     "pretrain_epochs", "finetune_epochs",
      "pairs_per_node", "score_rounds",    "pretrain_fraction",
      "inject_k",       "seed"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config key: " + key);
    }
  }
  try {
    if (j.contains("score_type")) c.score_type = j["score_type"];
    if (j.contains("meta_paths")) {
      c.meta_paths =
          j["meta_paths"].get<std::vector<std::vector<std::string>>>();
    }
    if (j.contains("alpha")) c.hp.alpha = j["alpha"];
    if (j.contains("beta")) c.hp.beta = j["beta"];
    if (j.contains("gamma")) c.hp.gamma = j["gamma"];
    if (j.contains("embed_dim")) c.hp.embed_dim = j["embed_dim"];
    if (j.contains("hidden_dim")) c.hp.hidden_dim = j["hidden_dim"];
    if (j.contains("readout")) {
      const std::string r = j["readout"];
      if (r == "avg") c.hp.readout = ReadoutMode::Average;
      else if (r == "min") c.hp.readout = ReadoutMode::Min;
      else if (r == "max") c.hp.readout = ReadoutMode::Max;
      else throw ConfigError("unknown readout mode: " + r);
    }
    if (j.contains("lr_profile")) {
      const auto lr = learning_rate_profile(j["lr_profile"]);
      if (!lr) {
        throw ConfigError("unknown lr_profile: " +
                          j["lr_profile"].get<std::string>());
      }
      c.learning_rate = *lr;
    }
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"];
    if (j.contains("pretrain_epochs")) c.pretrain_epochs = j["pretrain_epochs"];
    if (j.contains("finetune_epochs")) c.finetune_epochs = j["finetune_epochs"];
    if (j.contains("pairs_per_node")) c.pairs_per_node = j["pairs_per_node"];
    if (j.contains("score_rounds")) c.score_rounds = j["score_rounds"];
    if (j.contains("pretrain_fraction")) {
      c.pretrain_fraction = j["pretrain_fraction"];
    }
    if (j.contains("inject_k")) c.inject_k = j["inject_k"];
    if (j.contains("seed")) c.seed = j["seed"];
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  if (c.pretrain_fraction <= 0.0 || c.pretrain_fraction >= 1.0) {
    throw ConfigError("pretrain_fraction must lie in (0, 1)");
  }
  return c;
}

SynthSchema parse_synth_schema(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad synth schema JSON: ") + e.what());
  }
  SynthSchema s = dblp_shaped_schema();
  try {
    if (j.contains("node_types")) {
      s.node_types.clear();
      for (const auto& nt : j["node_types"]) {
        s.node_types.push_back({nt.at("name"), nt.at("count"),
                                nt.value("attr_dim", std::size_t{16})});
      }
    }
    if (j.contains("edge_types")) {
      s.edge_types.clear();
      for (const auto& et : j["edge_types"]) {
        s.edge_types.push_back({et.at("name"), et.at("src"), et.at("dst"),
                                et.value("mean_out_degree", 1.0)});
      }
    }
    if (j.contains("communities")) s.communities = j["communities"];
    if (j.contains("coherence")) s.coherence = j["coherence"];
    if (j.contains("edge_homophily")) s.edge_homophily = j["edge_homophily"];
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad synth schema: ") + e.what());
  }
  return s;
}

std::optional<double> learning_rate_profile(const std::string& name) {
  if (name == "dblp") return 0.001;
  if (name == "aminer") return 0.006;
  if (name == "yelp") return 0.001;
  return std::nullopt;
}

SplitResult split_graph(const HetGraph& graph, double fraction,
                        std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw ConfigError("split fraction must lie in (0, 1)");
  }
  const Schema& schema = graph.schema();
  const std::size_t T = schema.node_type_count();

  std::vector<std::vector<std::size_t>> pre_nodes(T), fine_nodes(T);
  // -1 = pretrain side, otherwise index within its side.
  std::vector<std::vector<std::pair<int, std::size_t>>> where(T);
  Rng root(seed);
  for (NodeTypeId t = 0; t < T; ++t) {
    const std::size_t n = graph.node_count(t);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng = root.fork(t);
    rng.shuffle(order);
    const std::size_t n_pre = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));
    if (n_pre == 0 || n_pre == n) {
      throw ConfigError("split leaves node type " + schema.node_type_name(t) +
                        " empty on one side");
    }
    where[t].resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (i < n_pre) {
        where[t][order[i]] = {0, pre_nodes[t].size()};
        pre_nodes[t].push_back(order[i]);
      } else {
        where[t][order[i]] = {1, fine_nodes[t].size()};
        fine_nodes[t].push_back(order[i]);
      }
    }
  }

  auto build_side = [&](int side, const std::vector<std::vector<std::size_t>>&
                                      nodes) {
    std::vector<std::size_t> counts(T);
    for (NodeTypeId t = 0; t < T; ++t) counts[t] = nodes[t].size();
    HetGraph sub(schema, counts);
    for (NodeTypeId t = 0; t < T; ++t) {
      const DenseMatrix& attrs = graph.attributes(t);
      DenseMatrix sub_attrs(nodes[t].size(), attrs.cols());
      for (std::size_t i = 0; i < nodes[t].size(); ++i) {
        const auto src = attrs.row(nodes[t][i]);
        auto dst = sub_attrs.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        sub.set_node_name(t, i, graph.node_name(t, nodes[t][i]));
      }
      sub.set_attributes(t, std::move(sub_attrs));
    }
    for (EdgeTypeId e = 0; e < schema.edge_type_count(); ++e) {
      const NodeTypeId st = schema.edge_src(e);
      const NodeTypeId dt = schema.edge_dst(e);
      for (const auto& [u, v] : graph.edges(e)) {
        const auto& wu = where[st][u];
        const auto& wv = where[dt][v];
        // Cross-split edges are dropped.
        if (wu.first == side && wv.first == side) {
          sub.add_edge(e, wu.second, wv.second);
        }
      }
    }
    sub.finalize();
    return sub;
  };

  SplitResult result{build_side(0, pre_nodes), build_side(1, fine_nodes),
                     std::move(pre_nodes), std::move(fine_nodes)};
  return result;
}

EagleParams train_model(const RunConfig& config, const HetGraph& graph,
                        std::optional<EagleParams> init, std::size_t epochs,
                        TrainTrace* trace) {
  TrainingContext ctx = make_context(config, graph);

  EagleParams params;
  if (init) {
    params = std::move(*init);
    if (params.paths.size() != ctx.paths.size() ||
        params.paths[0].encoder1.weight.rows() != ctx.attrs->cols()) {
      throw DataError("initial parameters incompatible with graph");
    }
    // Loss weights and readout stay configurable across fine-tuning.
    params.hp.alpha = config.hp.alpha;
    params.hp.beta = config.hp.beta;
    params.hp.gamma = config.hp.gamma;
    params.hp.readout = config.hp.readout;
  } else {
    params = init_eagle_params(ctx.attrs->cols(), ctx.paths.size(), config.hp,
                               mix_seed(config.seed, 0x11));
  }

  AdamState adam(config.learning_rate);
  const auto cached_positives =
      sample_cached_positives(ctx, config, mix_seed(config.seed, 0x22));
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    const auto pairs = sample_epoch_pairs(
        ctx, config, mix_seed(config.seed, 0x33), epoch, cached_positives);
    const double loss = run_epoch(ctx, params, adam, pairs);
    if (trace) trace->epoch_losses.push_back(loss);
  }
  return params;
}

Checkpoint pretrain(const RunConfig& config, const HetGraph& graph,
                    TrainTrace* trace) {
  Checkpoint ckpt;
  ckpt.params = train_model(config, graph, std::nullopt,
                            config.pretrain_epochs, trace);
  ckpt.schema_hash = graph.schema().hash();
  ckpt.attr_dim =
      graph.attributes(graph.schema().node_type(config.score_type)).cols();
  return ckpt;
}

ScoreReport detect(const RunConfig& config, const EagleParams& params,
                   const HetGraph& graph, const std::vector<int>& labels) {
  TrainingContext ctx = make_context(config, graph);
  if (labels.size() != ctx.n) {
    throw DataError("label count does not match scored node count");
  }

  ForwardOutputs forward = eagle_forward(params, *ctx.attrs, ctx.adjs, {});

  // Mean discrimination scores over score_rounds fresh samples per node.
  std::vector<double> pos_sum(ctx.n, 0.0), neg_sum(ctx.n, 0.0);
  std::vector<std::size_t> pos_cnt(ctx.n, 0), neg_cnt(ctx.n, 0);
  const std::uint64_t seed = mix_seed(config.seed, 0x55);
  for (std::size_t round = 0; round < config.score_rounds; ++round) {
    for (std::size_t i = 0; i < ctx.n; ++i) {
      const TypedNode target{ctx.score_type, i};
      for (const auto& p :
           sample_positive(*ctx.graph, target, ctx.paths, 1,
                           mix_seed(seed, round, 2 * i))) {
        if (auto sp = project_pair(p, ctx.score_type)) {
          const auto h_inst =
              readout_rows(forward.fused, sp->members, params.hp.readout);
          pos_sum[i] += discriminate(params.disc_weight,
                                     forward.fused.row(i), h_inst);
          ++pos_cnt[i];
        }
      }
      for (const auto& p :
           sample_negative(*ctx.graph, target, ctx.paths, 1,
                           mix_seed(seed, round, 2 * i + 1))) {
        if (auto sp = project_pair(p, ctx.score_type)) {
          const auto h_inst =
              readout_rows(forward.fused, sp->members, params.hp.readout);
          neg_sum[i] += discriminate(params.disc_weight,
                                     forward.fused.row(i), h_inst);
          ++neg_cnt[i];
        }
      }
    }
  }

  std::vector<double> scores(ctx.n);
  for (std::size_t i = 0; i < ctx.n; ++i) {
    std::optional<double> s_pos, s_neg;
    if (pos_cnt[i] > 0) s_pos = pos_sum[i] / static_cast<double>(pos_cnt[i]);
    if (neg_cnt[i] > 0) s_neg = neg_sum[i] / static_cast<double>(neg_cnt[i]);
    scores[i] = anomaly_score(i, forward, *ctx.attrs, ctx.adj_targets, s_pos,
                              s_neg, params.hp);
  }
  return make_report(scores, labels);
}

ScoreReport finetune_and_detect(const RunConfig& config,
                                const std::optional<Checkpoint>& checkpoint,
                                const HetGraph& graph,
                                const std::vector<int>& labels,
                                TrainTrace* trace) {
  std::optional<EagleParams> init;
  if (checkpoint) {
    if (checkpoint->schema_hash != graph.schema().hash()) {
      throw DataError("checkpoint schema does not match graph schema");
    }
    const std::size_t attr_dim =
        graph.attributes(graph.schema().node_type(config.score_type)).cols();
    if (checkpoint->attr_dim != attr_dim) {
      throw DataError("checkpoint attribute dimension mismatch");
    }
    init = checkpoint->params;
  }

  const auto t0 = Clock::now();
  EagleParams params = train_model(config, graph, std::move(init),
                                   config.finetune_epochs, trace);
  const double finetune_sec = seconds_since(t0);

  const auto t1 = Clock::now();
  ScoreReport report = detect(config, params, graph, labels);
  report.timings_sec["finetune"] = finetune_sec;
  report.timings_sec["scoring"] = seconds_since(t1);
  return report;
}

std::vector<BenchRow> benchmark(const RunConfig& config,
                                const std::vector<SynthSchema>& sizes,
                                std::size_t epochs_per_size) {
  if (sizes.empty()) throw ConfigError("benchmark: no graph sizes configured");
  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const HetGraph graph =
        generate_synthetic(sizes[s], mix_seed(config.seed, 0x77, s));
    TrainingContext ctx = make_context(config, graph);

    BenchRow row;
    row.label = "size" + std::to_string(s);
    row.nodes = graph.total_node_count();
    row.edges = graph.total_edge_count();

    auto t0 = Clock::now();
    const auto positives =
        sample_cached_positives(ctx, config, mix_seed(config.seed, 0x78, s));
    const auto pairs = sample_epoch_pairs(ctx, config,
                                          mix_seed(config.seed, 0x79, s), 0,
                                          positives);
    row.sampling_sec = seconds_since(t0);

    EagleParams params =
        init_eagle_params(ctx.attrs->cols(), ctx.paths.size(), config.hp,
                          mix_seed(config.seed, 0x7a, s));
    AdamState adam(config.learning_rate);
    t0 = Clock::now();
    for (std::size_t e = 0; e < epochs_per_size; ++e) {
      run_epoch(ctx, params, adam, pairs);
    }
    row.per_epoch_train_sec =
        seconds_since(t0) / static_cast<double>(epochs_per_size);

    t0 = Clock::now();
    std::vector<int> labels(ctx.n, 0);
    if (!labels.empty()) labels[0] = 1;  // AUC needs both classes
    detect(config, params, graph, labels);
    row.scoring_sec = seconds_since(t0);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string benchmark_tsv(const std::vector<BenchRow>& rows) {
  std::string out =
      "label\tnodes\tedges\tsampling_sec\tper_epoch_train_sec\tscoring_sec\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s\t%zu\t%zu\t%.6f\t%.6f\t%.6f\n",
                  r.label.c_str(), r.nodes, r.edges, r.sampling_sec,
                  r.per_epoch_train_sec, r.scoring_sec);
    out += buf;
  }
  return out;
}

SynthSchema dblp_shaped_schema() {
  SynthSchema schema;
  schema.node_types = {{"Author", 1000, 32}, {"Paper", 360, 32},
                       {"Venue", 46, 8}};
  schema.edge_types = {{"Write", "Author", "Paper", 1.3},
                       {"Publish", "Paper", "Venue", 1.0}};
  schema.communities = 8;
  schema.coherence = 0.9;
  schema.edge_homophily = 0.9;
  return schema;
}

RunConfig dblp_shaped_config() {
  RunConfig config;
  config.score_type = "Paper";
  config.meta_paths = {{"Paper", "Author", "Paper"},
                       {"Paper", "Venue", "Paper"}};
  return config;
}

}  // namespace eagle
