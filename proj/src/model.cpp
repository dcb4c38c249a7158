#include "eagle/model.hpp"

#include <algorithm>
#include <cmath>

namespace eagle {

std::vector<DenseMatrix*> EagleParams::trainable() {
  std::vector<DenseMatrix*> out;
  for (auto& p : paths) {
    out.push_back(&p.encoder1.weight);
    out.push_back(&p.encoder2.weight);
    out.push_back(&p.attr_decoder.weight);
  }
  out.push_back(&disc_weight);
  return out;
}

std::vector<const DenseMatrix*> EagleParams::trainable() const {
  std::vector<const DenseMatrix*> out;
  for (const auto& p : paths) {
    out.push_back(&p.encoder1.weight);
    out.push_back(&p.encoder2.weight);
    out.push_back(&p.attr_decoder.weight);
  }
  out.push_back(&disc_weight);
  return out;
}

std::vector<const DenseMatrix*> EagleGradients::trainable() const {
  std::vector<const DenseMatrix*> out;
  for (const auto& p : paths) {
    out.push_back(&p.encoder1.weight);
    out.push_back(&p.encoder2.weight);
    out.push_back(&p.attr_decoder.weight);
  }
  out.push_back(&disc_weight);
  return out;
}

EagleParams init_eagle_params(std::size_t attr_dim, std::size_t path_count,
                              const EagleHyperParams& hp, std::uint64_t seed) {
  if (attr_dim < 1 || path_count < 1 || hp.embed_dim < 1 || hp.hidden_dim < 1) {
    throw ConfigError("init_eagle_params: dimensions must be >= 1");
  }
  EagleParams params;
  params.hp = hp;
  Rng root(seed);
  for (std::size_t p = 0; p < path_count; ++p) {
    Rng rng = root.fork(p);
    EagleParams::PathParams pp;
    pp.encoder1 =
        make_gcn_layer(attr_dim, hp.hidden_dim, Activation::Relu, rng);
    pp.encoder2 =
        make_gcn_layer(hp.hidden_dim, hp.embed_dim, Activation::Linear, rng);
    pp.attr_decoder =
        make_gcn_layer(hp.embed_dim, attr_dim, Activation::Relu, rng);
    params.paths.push_back(std::move(pp));
  }
  Rng rng = root.fork(path_count);
  const double limit = std::sqrt(6.0 / static_cast<double>(2 * hp.embed_dim));
  params.disc_weight = DenseMatrix(hp.embed_dim, hp.embed_dim);
  for (double& w : params.disc_weight.values()) w = rng.uniform(-limit, limit);
  return params;
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

DenseMatrix fuse_average(const std::vector<DenseMatrix>& mats) {
  DenseMatrix fused(mats[0].rows(), mats[0].cols());
  for (const auto& m : mats) {
    const auto src = m.values();
    auto dst = fused.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += src[i];
  }
  const double inv = 1.0 / static_cast<double>(mats.size());
  for (double& v : fused.values()) v *= inv;
  return fused;
}

}  // namespace

DenseMatrix encode(const EagleParams& params, const DenseMatrix& attrs,
                   const std::vector<NormalizedAdjacency>& adjs) {
  if (adjs.size() != params.paths.size()) {
    throw DataError("encode: one adjacency per configured meta-path required");
  }
  std::vector<DenseMatrix> embeddings;
  for (std::size_t m = 0; m < params.paths.size(); ++m) {
    GcnTape t1, t2;
    DenseMatrix h1 =
        gcn_forward(params.paths[m].encoder1, attrs, adjs[m], t1);
    embeddings.push_back(
        gcn_forward(params.paths[m].encoder2, h1, adjs[m], t2));
  }
  return fuse_average(embeddings);
}

DenseMatrix decode_attr(const GcnLayer& decoder, const DenseMatrix& h,
                        const NormalizedAdjacency& adj) {
  GcnTape tape;
  return gcn_forward(decoder, h, adj, tape);
}

DenseMatrix decode_struct(const DenseMatrix& h) {
  for (double v : h.values()) {
    if (!std::isfinite(v)) throw DataError("decode_struct: non-finite input");
  }
  DenseMatrix inner = matmul_transpose_b(h, h);
  for (double& v : inner.values()) v = sigmoid(v);
  return inner;
}

double discriminate(const DenseMatrix& disc_weight,
                    std::span<const double> h_target,
                    std::span<const double> h_instance) {
  if (h_target.size() != disc_weight.rows() ||
      h_instance.size() != disc_weight.cols()) {
    throw DataError("discriminate: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < h_target.size(); ++i) {
    const auto w_row = disc_weight.row(i);
    double row_acc = 0.0;
    for (std::size_t j = 0; j < h_instance.size(); ++j) {
      row_acc += w_row[j] * h_instance[j];
    }
    acc += h_target[i] * row_acc;
  }
  return sigmoid(acc);
}

double loss_contrastive(std::span<const double> scores,
                        std::span<const double> labels) {
  if (scores.empty()) throw DataError("loss_contrastive: empty batch");
  if (scores.size() != labels.size()) {
    throw DataError("loss_contrastive: score/label length mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s =
        std::clamp(scores[i], kScoreClamp, 1.0 - kScoreClamp);
    loss -= labels[i] * std::log(s) + (1.0 - labels[i]) * std::log(1.0 - s);
  }
  return loss;
}

double loss_gae(const std::vector<DenseMatrix>& adj_targets,
                const DenseMatrix& struct_recon, const DenseMatrix& attrs,
                const std::vector<DenseMatrix>& attr_recon, double alpha,
                double beta) {
  if (adj_targets.size() != attr_recon.size()) {
    throw DataError("loss_gae: per-path input count mismatch");
  }
  double loss = 0.0;
  for (std::size_t m = 0; m < adj_targets.size(); ++m) {
    loss += alpha * frobenius_sq(adj_targets[m], struct_recon) +
            beta * frobenius_sq(attrs, attr_recon[m]);
  }
  return loss;
}

double loss_total(double l_gae, double l_con, double gamma) {
  return l_gae + gamma * l_con;
}

ForwardOutputs eagle_forward(const EagleParams& params,
                             const DenseMatrix& attrs,
                             const std::vector<NormalizedAdjacency>& adjs,
                             const std::vector<ScoredPair>& pairs) {
  if (adjs.size() != params.paths.size()) {
    throw DataError("eagle_forward: adjacency count mismatch");
  }
  ForwardOutputs out;
  const std::size_t P = params.paths.size();
  out.enc1_tapes.resize(P);
  out.enc2_tapes.resize(P);
  out.attr_tapes.resize(P);

  for (std::size_t m = 0; m < P; ++m) {
    DenseMatrix h1 = gcn_forward(params.paths[m].encoder1, attrs, adjs[m],
                                 out.enc1_tapes[m]);
    out.path_embeddings.push_back(gcn_forward(params.paths[m].encoder2, h1,
                                              adjs[m], out.enc2_tapes[m]));
  }
  out.fused = fuse_average(out.path_embeddings);

  for (std::size_t m = 0; m < P; ++m) {
    out.attr_recon.push_back(gcn_forward(params.paths[m].attr_decoder,
                                         out.fused, adjs[m],
                                         out.attr_tapes[m]));
  }
  out.struct_recon = decode_struct(out.fused);

  out.pair_scores.reserve(pairs.size());
  for (const auto& pair : pairs) {
    const auto h_inst =
        readout_rows(out.fused, pair.members, params.hp.readout);
    out.pair_scores.push_back(
        discriminate(params.disc_weight, out.fused.row(pair.target), h_inst));
  }
  return out;
}

namespace {

// Scatter the instance-embedding gradient back through the readout.
void readout_backward(const DenseMatrix& h, const ScoredPair& pair,
                      ReadoutMode mode, std::span<const double> grad_inst,
                      DenseMatrix& grad_h) {
  const std::size_t d = h.cols();
  if (mode == ReadoutMode::Average) {
    const double inv = 1.0 / static_cast<double>(pair.members.size());
    for (std::size_t r : pair.members) {
      auto g_row = grad_h.row(r);
      for (std::size_t j = 0; j < d; ++j) g_row[j] += inv * grad_inst[j];
    }
    return;
  }
  // Min/Max: the gradient flows to the first row attaining the extremum.
  for (std::size_t j = 0; j < d; ++j) {
    std::size_t best = pair.members[0];
    double best_v = h(best, j);
    for (std::size_t r : pair.members) {
      const double v = h(r, j);
      const bool better = mode == ReadoutMode::Min ? v < best_v : v > best_v;
      if (better) {
        best = r;
        best_v = v;
      }
    }
    grad_h(best, j) += grad_inst[j];
  }
}

}  // namespace

EagleGradients eagle_backward(const EagleParams& params,
                              ForwardOutputs& forward,
                              const DenseMatrix& attrs,
                              const std::vector<NormalizedAdjacency>& adjs,
                              const std::vector<DenseMatrix>& adj_targets,
                              const std::vector<ScoredPair>& pairs) {
  const std::size_t P = params.paths.size();
  const std::size_t n = forward.fused.rows();
  const std::size_t d = params.hp.embed_dim;
  const double alpha = params.hp.alpha;
  const double beta = params.hp.beta;
  const double gamma = params.hp.gamma;

  EagleGradients grads;
  grads.paths.resize(P);
  grads.disc_weight = DenseMatrix(d, d);

  DenseMatrix grad_h(n, d);

  // Structure term: d/dH of sum_m alpha * |A_m - sigmoid(H H^T)|_F^2.
  {
    DenseMatrix d_pre(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double a_hat = forward.struct_recon(i, j);
        double d_ahat = 0.0;
        for (const auto& target : adj_targets) {
          d_ahat += 2.0 * alpha * (a_hat - target(i, j));
        }
        d_pre(i, j) = d_ahat * a_hat * (1.0 - a_hat);
      }
    }
    // d_pre is symmetric, so dH = 2 * d_pre * H.
    DenseMatrix contrib = matmul(d_pre, forward.fused);
    auto gh = grad_h.values();
    const auto cv = contrib.values();
    for (std::size_t i = 0; i < gh.size(); ++i) gh[i] += 2.0 * cv[i];
  }

  // Attribute decoders.
  for (std::size_t m = 0; m < P; ++m) {
    DenseMatrix upstream(attrs.rows(), attrs.cols());
    const auto xv = attrs.values();
    const auto rv = forward.attr_recon[m].values();
    auto uv = upstream.values();
    for (std::size_t i = 0; i < uv.size(); ++i) {
      uv[i] = 2.0 * beta * (rv[i] - xv[i]);
    }
    GcnGradients g = gcn_backward(forward.attr_tapes[m], upstream);
    grads.paths[m].attr_decoder.weight = std::move(g.weight);
    auto gh = grad_h.values();
    const auto gi = g.input.values();
    for (std::size_t i = 0; i < gh.size(); ++i) gh[i] += gi[i];
  }

  // Discriminator and contrastive term.
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& pair = pairs[k];
    const double s = forward.pair_scores[k];
    // BCE composed with the sigmoid: d/d(logit) = s - y.
    const double g = gamma * (s - pair.label);
    const auto h_inst =
        readout_rows(forward.fused, pair.members, params.hp.readout);
    const auto u = forward.fused.row(pair.target);

    std::vector<double> grad_u(d, 0.0), grad_v(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      auto w_row = grads.disc_weight.row(i);
      const auto wp = params.disc_weight.row(i);
      for (std::size_t j = 0; j < d; ++j) {
        w_row[j] += g * u[i] * h_inst[j];
        grad_u[i] += g * wp[j] * h_inst[j];
        grad_v[j] += g * wp[j] * u[i];
      }
    }
    auto gt = grad_h.row(pair.target);
    for (std::size_t i = 0; i < d; ++i) gt[i] += grad_u[i];
    readout_backward(forward.fused, pair, params.hp.readout, grad_v, grad_h);
  }

  // Encoders: the fusion is an average, so each path sees grad_h / P.
  DenseMatrix grad_path = grad_h;
  {
    const double inv = 1.0 / static_cast<double>(P);
    for (double& v : grad_path.values()) v *= inv;
  }
  for (std::size_t m = 0; m < P; ++m) {
    GcnGradients g2 = gcn_backward(forward.enc2_tapes[m], grad_path);
    grads.paths[m].encoder2.weight = std::move(g2.weight);
    GcnGradients g1 = gcn_backward(forward.enc1_tapes[m], g2.input);
    grads.paths[m].encoder1.weight = std::move(g1.weight);
  }
  return grads;
}

double anomaly_score(std::size_t node, const ForwardOutputs& forward,
                     const DenseMatrix& attrs,
                     const std::vector<DenseMatrix>& adj_targets,
                     std::optional<double> s_pos, std::optional<double> s_neg,
                     const EagleHyperParams& hp) {
  const std::size_t P = adj_targets.size();
  double struct_err = 0.0;
  double attr_err = 0.0;
  for (std::size_t m = 0; m < P; ++m) {
    struct_err += row_l2(adj_targets[m], forward.struct_recon, node);
    attr_err += row_l2(attrs, forward.attr_recon[m], node);
  }
  struct_err /= static_cast<double>(P);
  attr_err /= static_cast<double>(P);
  double disc = 0.0;
  if (s_pos && s_neg) disc = *s_neg - *s_pos;
  return hp.alpha * struct_err + hp.beta * attr_err + hp.gamma * disc;
}

}  // namespace eagle
