#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "eagle/evaluation.hpp"
#include "eagle/graph_io.hpp"
#include "eagle/injector.hpp"
#include "eagle/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw eagle::DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw eagle::DataError("cannot write " + path.string());
  out << text;
}

// Shared flags: --config plus per-key overrides applied on top of it.
struct CommonOpts {
  std::string config_file;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha, beta, gamma, learning_rate, fraction;
  std::optional<std::size_t> embed_dim, hidden_dim, pretrain_epochs,
      finetune_epochs, pairs_per_node, score_rounds, k;
  std::optional<std::string> readout, lr_profile, score_type;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "Run config JSON file");
    cmd->add_option("--out-dir", out_dir, "Output directory");
    cmd->add_option("--seed", seed, "Override the run seed");
    cmd->add_option("--alpha", alpha, "Structure loss weight");
    cmd->add_option("--beta", beta, "Attribute loss weight");
    cmd->add_option("--gamma", gamma, "Contrastive loss weight");
    cmd->add_option("--lr", learning_rate, "Learning rate");
    cmd->add_option("--lr-profile", lr_profile,
                    "Named learning-rate profile (dblp|aminer|yelp)");
    cmd->add_option("--embed-dim", embed_dim, "Embedding dimension");
    cmd->add_option("--hidden-dim", hidden_dim, "Encoder hidden dimension");
    cmd->add_option("--readout", readout, "Readout mode (avg|min|max)");
    cmd->add_option("--pretrain-epochs", pretrain_epochs, "Pretrain epochs");
    cmd->add_option("--finetune-epochs", finetune_epochs, "Fine-tune epochs");
    cmd->add_option("--pairs-per-node", pairs_per_node,
                    "Contrastive pairs per node per epoch");
    cmd->add_option("--score-rounds", score_rounds,
                    "Sampling rounds when scoring");
    cmd->add_option("--fraction", fraction, "Pretrain split fraction");
    cmd->add_option("--k", k, "Injection candidate pool size");
    cmd->add_option("--score-type", score_type, "Scored node type name");
  }

  eagle::RunConfig resolve() const {
    eagle::RunConfig c = config_file.empty()
                             ? eagle::dblp_shaped_config()
                             : eagle::parse_run_config(read_config_file());
    if (seed) c.seed = *seed;
    if (alpha) c.hp.alpha = *alpha;
    if (beta) c.hp.beta = *beta;
    if (gamma) c.hp.gamma = *gamma;
    if (lr_profile) {
      const auto lr = eagle::learning_rate_profile(*lr_profile);
      if (!lr) throw eagle::ConfigError("unknown lr profile: " + *lr_profile);
      c.learning_rate = *lr;
    }
    if (learning_rate) c.learning_rate = *learning_rate;
    if (embed_dim) c.hp.embed_dim = *embed_dim;
    if (hidden_dim) c.hp.hidden_dim = *hidden_dim;
    if (readout) {
      if (*readout == "avg") c.hp.readout = eagle::ReadoutMode::Average;
      else if (*readout == "min") c.hp.readout = eagle::ReadoutMode::Min;
      else if (*readout == "max") c.hp.readout = eagle::ReadoutMode::Max;
      else throw eagle::ConfigError("unknown readout: " + *readout);
    }
    if (pretrain_epochs) c.pretrain_epochs = *pretrain_epochs;
    if (finetune_epochs) c.finetune_epochs = *finetune_epochs;
    if (pairs_per_node) c.pairs_per_node = *pairs_per_node;
    if (score_rounds) c.score_rounds = *score_rounds;
    if (fraction) c.pretrain_fraction = *fraction;
    if (k) c.inject_k = *k;
    if (score_type) c.score_type = *score_type;
    return c;
  }

 private:
  // A missing config file is a configuration problem, not a data problem.
  std::string read_config_file() const {
    try {
      return read_file(config_file);
    } catch (const eagle::DataError& e) {
      throw eagle::ConfigError(e.what());
    }
  }
};

std::string loss_trace_text(const eagle::TrainTrace& trace) {
  std::string out = "epoch,loss\n";
  for (std::size_t i = 0; i < trace.epoch_losses.size(); ++i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%zu,%.10g\n", i, trace.epoch_losses[i]);
    out += buf;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EAGLE heterogeneous-graph anomaly detection"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic graph");
  CommonOpts gen_opts;
  std::string gen_schema_file;
  gen_opts.attach(gen);
  gen->add_option("--schema", gen_schema_file,
                  "Synthetic schema JSON (default: DBLP-shaped)");

  // inject
  auto* inject = app.add_subcommand("inject", "Inject contextual anomalies");
  CommonOpts inject_opts;
  std::string inject_graph;
  std::size_t inject_count = 0;
  double inject_frac = 0.0;
  inject_opts.attach(inject);
  inject->add_option("--graph", inject_graph, "Graph directory")->required();
  inject->add_option("--count", inject_count, "Number of anomalies");
  inject->add_option("--frac", inject_frac,
                     "Anomaly fraction of the scored type");

  // split
  auto* split = app.add_subcommand("split", "Pretrain/fine-tune node split");
  CommonOpts split_opts;
  std::string split_graph_dir;
  split_opts.attach(split);
  split->add_option("--graph", split_graph_dir, "Graph directory")->required();

  // pretrain
  auto* pre = app.add_subcommand("pretrain", "Pretrain and write a checkpoint");
  CommonOpts pre_opts;
  std::string pre_graph;
  pre_opts.attach(pre);
  pre->add_option("--graph", pre_graph, "Graph directory")->required();

  // detect
  auto* det = app.add_subcommand("detect", "Fine-tune, score and rank nodes");
  CommonOpts det_opts;
  std::string det_graph, det_labels, det_checkpoint;
  bool det_no_pretrain = false;
  det_opts.attach(det);
  det->add_option("--graph", det_graph, "Graph directory")->required();
  det->add_option("--labels", det_labels, "Ground-truth label file")->required();
  det->add_option("--checkpoint", det_checkpoint, "Pretrained checkpoint");
  det->add_flag("--no-pretrain", det_no_pretrain,
                "Train from random initialization (ablation arm)");

  // eval
  auto* ev = app.add_subcommand("eval", "Recompute metrics from a report");
  CommonOpts ev_opts;
  std::string ev_report, ev_labels;
  ev_opts.attach(ev);
  ev->add_option("--report", ev_report, "report.csv from detect")->required();
  ev->add_option("--labels", ev_labels, "Label file (default: report labels)");

  // bench
  auto* bench = app.add_subcommand("bench", "Timing sweep over graph sizes");
  CommonOpts bench_opts;
  std::size_t bench_points = 4;
  std::size_t bench_epochs = 10;
  std::string bench_dims;
  bench_opts.attach(bench);
  bench->add_option("--points", bench_points, "Sweep points (edge doubling)");
  bench->add_option("--epochs", bench_epochs, "Training epochs per point");
  bench->add_option("--dims", bench_dims,
                    "Comma-separated embedding dims for an AUC sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      const eagle::RunConfig config = gen_opts.resolve();
      eagle::SynthSchema schema =
          gen_schema_file.empty()
              ? eagle::dblp_shaped_schema()
              : eagle::parse_synth_schema(read_file(gen_schema_file));
      const eagle::HetGraph graph =
          eagle::generate_synthetic(schema, config.seed);
      eagle::save_graph(graph, gen_opts.out_dir);
      std::cout << "wrote graph with " << graph.total_node_count()
                << " nodes, " << graph.total_edge_count() << " edges to "
                << gen_opts.out_dir << "\n";
    } else if (*inject) {
      const eagle::RunConfig config = inject_opts.resolve();
      const eagle::HetGraph graph = eagle::load_graph(inject_graph);
      const eagle::NodeTypeId type =
          graph.schema().node_type(config.score_type);
      std::size_t count = inject_count;
      if (count == 0 && inject_frac > 0.0) {
        count = static_cast<std::size_t>(
            inject_frac * static_cast<double>(graph.node_count(type)) + 0.5);
      }
      if (count == 0) {
        throw eagle::ConfigError("give --count or --frac > 0");
      }
      auto result = eagle::inject_contextual(graph, type, count,
                                             config.inject_k, config.seed);
      const fs::path out = inject_opts.out_dir;
      eagle::save_graph(result.graph, out);
      eagle::save_labels(
          eagle::injection_labels(result.record, graph.node_count(type)),
          out / "labels.csv");
      eagle::save_injection_record(result.record, out / "injection.json");
      std::cout << "injected " << count << " anomalies into "
                << config.score_type << " nodes\n";
    } else if (*split) {
      const eagle::RunConfig config = split_opts.resolve();
      const eagle::HetGraph graph = eagle::load_graph(split_graph_dir);
      auto result =
          eagle::split_graph(graph, config.pretrain_fraction, config.seed);
      const fs::path out = split_opts.out_dir;
      eagle::save_graph(result.pretrain_graph, out / "pretrain");
      eagle::save_graph(result.finetune_graph, out / "finetune");
      std::cout << "split " << graph.total_node_count() << " nodes into "
                << result.pretrain_graph.total_node_count() << " / "
                << result.finetune_graph.total_node_count() << "\n";
    } else if (*pre) {
      const eagle::RunConfig config = pre_opts.resolve();
      const eagle::HetGraph graph = eagle::load_graph(pre_graph);
      eagle::TrainTrace trace;
      const eagle::Checkpoint ckpt = eagle::pretrain(config, graph, &trace);
      const fs::path out = pre_opts.out_dir;
      fs::create_directories(out);
      eagle::save_checkpoint(ckpt, out / "checkpoint.txt");
      write_file(out / "loss_trace.csv", loss_trace_text(trace));
      std::cout << "pretrained " << config.pretrain_epochs
                << " epochs; checkpoint at " << (out / "checkpoint.txt")
                << "\n";
    } else if (*det) {
      const eagle::RunConfig config = det_opts.resolve();
      const eagle::HetGraph graph = eagle::load_graph(det_graph);
      const std::vector<int> labels = eagle::load_labels(det_labels);
      std::optional<eagle::Checkpoint> ckpt;
      if (!det_no_pretrain) {
        if (det_checkpoint.empty()) {
          throw eagle::ConfigError("give --checkpoint or --no-pretrain");
        }
        ckpt = eagle::load_checkpoint(det_checkpoint);
      }
      eagle::TrainTrace trace;
      const eagle::ScoreReport report =
          eagle::finetune_and_detect(config, ckpt, graph, labels, &trace);
      const fs::path out = det_opts.out_dir;
      fs::create_directories(out);
      write_file(out / "report.csv", eagle::report_csv(report));
      write_file(out / "metrics.json", eagle::report_metrics_json(report));
      write_file(out / "loss_trace.csv", loss_trace_text(trace));
      std::cout << "auc " << report.auc << "\n";
    } else if (*ev) {
      // Parse report.csv back into scores/labels.
      std::ifstream in(ev_report);
      if (!in) throw eagle::DataError("cannot open " + ev_report);
      std::string line;
      std::getline(in, line);  // header
      std::vector<std::pair<std::size_t, double>> scored;
      std::vector<int> csv_labels;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string node, score, rank, label;
        std::getline(ss, node, ',');
        std::getline(ss, score, ',');
        std::getline(ss, rank, ',');
        std::getline(ss, label, ',');
        scored.emplace_back(std::stoul(node), std::stod(score));
        csv_labels.push_back(std::stoi(label));
      }
      std::vector<double> scores(scored.size());
      std::vector<int> labels(scored.size());
      for (std::size_t i = 0; i < scored.size(); ++i) {
        scores[scored[i].first] = scored[i].second;
        labels[scored[i].first] = csv_labels[i];
      }
      if (!ev_labels.empty()) labels = eagle::load_labels(ev_labels);
      const eagle::ScoreReport report = eagle::make_report(scores, labels);
      const std::string metrics = eagle::report_metrics_json(report);
      std::cout << metrics;
      if (ev_opts.out_dir != ".") {
        fs::create_directories(ev_opts.out_dir);
        write_file(fs::path(ev_opts.out_dir) / "metrics.json", metrics);
      }
    } else if (*bench) {
      const eagle::RunConfig config = bench_opts.resolve();
      if (bench_points < 1) throw eagle::ConfigError("--points must be >= 1");
      std::vector<eagle::SynthSchema> sizes;
      eagle::SynthSchema base = eagle::dblp_shaped_schema();
      for (std::size_t p = 0; p < bench_points; ++p) {
        sizes.push_back(base);
        for (auto& et : base.edge_types) et.mean_out_degree *= 2.0;
      }
      const auto rows = eagle::benchmark(config, sizes, bench_epochs);
      const std::string tsv = eagle::benchmark_tsv(rows);
      std::cout << tsv;
      fs::create_directories(bench_opts.out_dir);
      write_file(fs::path(bench_opts.out_dir) / "bench.tsv", tsv);

      if (!bench_dims.empty()) {
        std::vector<std::pair<std::size_t, double>> sweep;
        std::stringstream ss(bench_dims);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          const std::size_t dim = std::stoul(tok);
          eagle::RunConfig c = config;
          c.hp.embed_dim = dim;
          const eagle::HetGraph graph =
              eagle::generate_synthetic(eagle::dblp_shaped_schema(), c.seed);
          const eagle::NodeTypeId type =
              graph.schema().node_type(c.score_type);
          auto injected = eagle::inject_contextual(
              graph, type, graph.node_count(type) / 20, c.inject_k, c.seed);
          const auto labels = eagle::injection_labels(
              injected.record, graph.node_count(type));
          const auto report = eagle::finetune_and_detect(
              c, std::nullopt, injected.graph, labels);
          sweep.emplace_back(dim, report.auc);
        }
        const std::string sweep_tsv = eagle::dimension_sweep_tsv(sweep);
        std::cout << sweep_tsv;
        write_file(fs::path(bench_opts.out_dir) / "dim_sweep.tsv", sweep_tsv);
      }
    }
  } catch (const eagle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const eagle::TrainingError& e) {
    std::cerr << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const eagle::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
