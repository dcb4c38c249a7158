#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eagle/evaluation.hpp"
#include "eagle/graph_io.hpp"
#include "eagle/hetgraph.hpp"
#include "eagle/injector.hpp"
#include "eagle/model.hpp"

namespace eagle {

struct RunConfig {
  std::string score_type = "Paper";
  std::vector<std::vector<std::string>> meta_paths;  // type-name sequences

  EagleHyperParams hp;
  double learning_rate = 0.001;
  std::size_t pretrain_epochs = 300;
  std::size_t finetune_epochs = 100;
  std::size_t pairs_per_node = 1;  // positives and negatives, each
  std::size_t score_rounds = 10;   // sampling rounds for s+/s- at scoring
  double pretrain_fraction = 0.3;
  std::size_t inject_k = 50;
  std::uint64_t seed = 1;
};

// Learning-rate presets from the reference configuration.
std::optional<double> learning_rate_profile(const std::string& name);

// JSON config parsing; unknown keys are rejected. Every key has a default,
// so "{}" is a valid config.
RunConfig parse_run_config(const std::string& json_text);
SynthSchema parse_synth_schema(const std::string& json_text);

// Node-induced random split per type; edges crossing the split are dropped.
struct SplitResult {
  HetGraph pretrain_graph;
  HetGraph finetune_graph;
  // original node index per type, in subgraph order
  std::vector<std::vector<std::size_t>> pretrain_nodes;
  std::vector<std::vector<std::size_t>> finetune_nodes;
};

SplitResult split_graph(const HetGraph& graph, double fraction,
                        std::uint64_t seed);

struct TrainTrace {
  std::vector<double> epoch_losses;
};

// Full-batch training loop shared by pretraining and fine-tuning. `init`
// empty = seeded random initialization.
EagleParams train_model(const RunConfig& config, const HetGraph& graph,
                        std::optional<EagleParams> init, std::size_t epochs,
                        TrainTrace* trace = nullptr);

Checkpoint pretrain(const RunConfig& config, const HetGraph& graph,
                    TrainTrace* trace = nullptr);

// Score every node of the scored type with trained parameters.
ScoreReport detect(const RunConfig& config, const EagleParams& params,
                   const HetGraph& graph, const std::vector<int>& labels);

// checkpoint == nullopt reproduces the no-pretraining ablation arm.
ScoreReport finetune_and_detect(const RunConfig& config,
                                const std::optional<Checkpoint>& checkpoint,
                                const HetGraph& graph,
                                const std::vector<int>& labels,
                                TrainTrace* trace = nullptr);

struct BenchRow {
  std::string label;
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double sampling_sec = 0.0;
  double per_epoch_train_sec = 0.0;
  double scoring_sec = 0.0;
};

// One row per configured graph size; training runs a short fixed number of
// epochs and reports per-epoch wall-clock.
std::vector<BenchRow> benchmark(const RunConfig& config,
                                const std::vector<SynthSchema>& sizes,
                                std::size_t epochs_per_size = 10);

std::string benchmark_tsv(const std::vector<BenchRow>& rows);

// DBLP-shaped synthetic preset at roughly 1/10 scale.
SynthSchema dblp_shaped_schema();
RunConfig dblp_shaped_config();

}  // namespace eagle
