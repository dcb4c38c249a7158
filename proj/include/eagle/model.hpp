#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "eagle/linalg.hpp"
#include "eagle/neuralcore.hpp"

namespace eagle {

struct EagleHyperParams {
  double alpha = 0.8;
  double beta = 0.2;
  double gamma = 0.3;
  std::size_t embed_dim = 64;
  std::size_t hidden_dim = 64;
  ReadoutMode readout = ReadoutMode::Average;
};

// All trainable weights: one 2-layer GCN encoder and one GCN attribute
// decoder per meta-path, plus the bilinear discriminator matrix. The
// structure decoder is the parameter-free inner product.
struct EagleParams {
  struct PathParams {
    GcnLayer encoder1;  // relu
    GcnLayer encoder2;  // linear
    GcnLayer attr_decoder;  // relu, embed_dim -> attr_dim
  };

  std::vector<PathParams> paths;
  DenseMatrix disc_weight;  // embed_dim x embed_dim
  EagleHyperParams hp;

  std::vector<DenseMatrix*> trainable();
  std::vector<const DenseMatrix*> trainable() const;
};

EagleParams init_eagle_params(std::size_t attr_dim, std::size_t path_count,
                              const EagleHyperParams& hp, std::uint64_t seed);

// One contrastive pair projected onto the scored node type: member indices
// are the instance's scored-type members, target already excluded for
// positives. label 1 = positive, 0 = negative.
struct ScoredPair {
  std::size_t target = 0;
  std::vector<std::size_t> members;
  double label = 1.0;
};

struct ForwardOutputs {
  std::vector<DenseMatrix> path_embeddings;  // per path, pre-fusion
  DenseMatrix fused;                         // H, n x d
  std::vector<DenseMatrix> attr_recon;       // X-hat per path
  DenseMatrix struct_recon;                  // A-hat = sigmoid(H H^T)
  std::vector<double> pair_scores;           // one per ScoredPair

  // Tapes for the backward pass, one per path and stage.
  std::vector<GcnTape> enc1_tapes;
  std::vector<GcnTape> enc2_tapes;
  std::vector<GcnTape> attr_tapes;
};

// Per-meta-path 2-layer GCN embeddings fused by elementwise average.
DenseMatrix encode(const EagleParams& params, const DenseMatrix& attrs,
                   const std::vector<NormalizedAdjacency>& adjs);

DenseMatrix decode_attr(const GcnLayer& decoder, const DenseMatrix& h,
                        const NormalizedAdjacency& adj);

// A-hat_ij = sigmoid(h_i . h_j); symmetric, entries in (0, 1).
DenseMatrix decode_struct(const DenseMatrix& h);

// s = sigmoid(h_target^T W h_instance).
double discriminate(const DenseMatrix& disc_weight,
                    std::span<const double> h_target,
                    std::span<const double> h_instance);

double loss_contrastive(std::span<const double> scores,
                        std::span<const double> labels);

// alpha * sum_m |A_m - A-hat|_F^2 + beta * sum_m |X - X-hat_m|_F^2.
double loss_gae(const std::vector<DenseMatrix>& adj_targets,
                const DenseMatrix& struct_recon, const DenseMatrix& attrs,
                const std::vector<DenseMatrix>& attr_recon, double alpha,
                double beta);

double loss_total(double l_gae, double l_con, double gamma);

ForwardOutputs eagle_forward(const EagleParams& params,
                             const DenseMatrix& attrs,
                             const std::vector<NormalizedAdjacency>& adjs,
                             const std::vector<ScoredPair>& pairs);

struct EagleGradients {
  std::vector<EagleParams::PathParams> paths;  // same shapes as params
  DenseMatrix disc_weight;

  std::vector<const DenseMatrix*> trainable() const;
};

// Analytic gradient of loss_total over the whole fixed computation graph.
EagleGradients eagle_backward(const EagleParams& params,
                              ForwardOutputs& forward,
                              const DenseMatrix& attrs,
                              const std::vector<NormalizedAdjacency>& adjs,
                              const std::vector<DenseMatrix>& adj_targets,
                              const std::vector<ScoredPair>& pairs);

// Eq.-style combined score: alpha * mean-path structure row error +
// beta * mean-path attribute row error + gamma * (s_neg - s_pos).
// s_pos/s_neg are the node's mean discrimination scores; pass nullopt when
// the node had no sampled pair (term contributes 0).
double anomaly_score(std::size_t node, const ForwardOutputs& forward,
                     const DenseMatrix& attrs,
                     const std::vector<DenseMatrix>& adj_targets,
                     std::optional<double> s_pos, std::optional<double> s_neg,
                     const EagleHyperParams& hp);

inline constexpr double kScoreClamp = 1e-7;

}  // namespace eagle
