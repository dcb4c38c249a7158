#include "eagle/neuralcore.hpp"

#include <cmath>
#include <limits>

namespace eagle {

double apply_activation(Activation act, double x) {
  switch (act) {
    case Activation::Relu:
      return x > 0.0 ? x : 0.0;
    case Activation::Sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Activation::Linear:
      return x;
  }
  return x;
}

double activation_grad(Activation act, double post) {
  switch (act) {
    case Activation::Relu:
      return post > 0.0 ? 1.0 : 0.0;
    case Activation::Sigmoid:
      return post * (1.0 - post);
    case Activation::Linear:
      return 1.0;
  }
  return 1.0;
}

GcnLayer make_gcn_layer(std::size_t in_dim, std::size_t out_dim,
                        Activation act, Rng& rng) {
  if (in_dim < 1 || out_dim < 1) throw ConfigError("layer dims must be >= 1");
  // Glorot-uniform keeps early sigmoid outputs away from saturation.
  const double limit =
      std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  GcnLayer layer;
  layer.weight = DenseMatrix(in_dim, out_dim);
  for (double& w : layer.weight.values()) w = rng.uniform(-limit, limit);
  layer.activation = act;
  return layer;
}

DenseMatrix gcn_forward(const GcnLayer& layer, const DenseMatrix& h,
                        const NormalizedAdjacency& a_norm, GcnTape& tape) {
  if (h.cols() != layer.weight.rows()) {
    throw DataError("gcn_forward: input width does not match weight");
  }
  if (a_norm.size() != h.rows()) {
    throw DataError("gcn_forward: adjacency size does not match input rows");
  }
  tape.propagated = spmm(a_norm, h);
  DenseMatrix out = matmul(tape.propagated, layer.weight);
  for (double& v : out.values()) v = apply_activation(layer.activation, v);
  tape.output = out;
  tape.a_norm = &a_norm;
  tape.layer = &layer;
  tape.valid = true;
  return out;
}

GcnGradients gcn_backward(GcnTape& tape, const DenseMatrix& upstream) {
  if (!tape.valid) throw DataError("gcn_backward: stale or unused tape");
  if (!upstream.same_shape(tape.output)) {
    throw DataError("gcn_backward: upstream shape mismatch");
  }
  tape.valid = false;

  // dZ = upstream (.) act'(output), Z = (A H) W
  DenseMatrix dz = upstream;
  {
    const auto out = tape.output.values();
    auto dzv = dz.values();
    for (std::size_t i = 0; i < dzv.size(); ++i) {
      dzv[i] *= activation_grad(tape.layer->activation, out[i]);
    }
  }

  GcnGradients grads;
  grads.weight = matmul_transpose_a(tape.propagated, dz);
  // dH = A^T (dZ W^T); A is symmetric by construction.
  grads.input = spmm(*tape.a_norm, matmul_transpose_b(dz, tape.layer->weight));
  return grads;
}

std::vector<double> readout(const DenseMatrix& rows, ReadoutMode mode) {
  if (rows.rows() == 0) throw DataError("readout: empty input");
  std::vector<double> out(rows.cols());
  for (std::size_t j = 0; j < rows.cols(); ++j) {
    double acc = rows(0, j);
    for (std::size_t i = 1; i < rows.rows(); ++i) {
      const double v = rows(i, j);
      switch (mode) {
        case ReadoutMode::Average:
          acc += v;
          break;
        case ReadoutMode::Min:
          acc = std::min(acc, v);
          break;
        case ReadoutMode::Max:
          acc = std::max(acc, v);
          break;
      }
    }
    out[j] = mode == ReadoutMode::Average
                 ? acc / static_cast<double>(rows.rows())
                 : acc;
  }
  return out;
}

std::vector<double> readout_rows(const DenseMatrix& h,
                                 std::span<const std::size_t> row_indices,
                                 ReadoutMode mode) {
  if (row_indices.empty()) throw DataError("readout_rows: empty selection");
  DenseMatrix sub(row_indices.size(), h.cols());
  for (std::size_t i = 0; i < row_indices.size(); ++i) {
    const auto src = h.row(row_indices[i]);
    auto dst = sub.row(i);
    std::copy(src.begin(), src.end(), dst.begin());
  }
  return readout(sub, mode);
}

void AdamState::step(std::span<DenseMatrix* const> params,
                     std::span<const DenseMatrix* const> grads) {
  if (params.size() != grads.size()) {
    throw DataError("adam: parameter/gradient count mismatch");
  }
  if (m_.empty()) {
    for (const DenseMatrix* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  }
  if (m_.size() != params.size()) {
    throw DataError("adam: parameter count changed between steps");
  }
  ++step_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(step_));
  for (std::size_t p = 0; p < params.size(); ++p) {
    auto pv = params[p]->values();
    const auto gv = grads[p]->values();
    if (pv.size() != gv.size()) throw DataError("adam: shape mismatch");
    auto mv = m_[p].values();
    auto vv = v_[p].values();
    for (std::size_t i = 0; i < pv.size(); ++i) {
      const double g = gv[i];
      if (!std::isfinite(g)) throw TrainingError("non-finite gradient");
      mv[i] = beta1_ * mv[i] + (1.0 - beta1_) * g;
      vv[i] = beta2_ * vv[i] + (1.0 - beta2_) * g * g;
      const double m_hat = mv[i] / bc1;
      const double v_hat = vv[i] / bc2;
      pv[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
  }
}

}  // namespace eagle
