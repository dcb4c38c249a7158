#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eagle/dense.hpp"
#include "eagle/errors.hpp"
#include "eagle/linalg.hpp"
#include "eagle/rng.hpp"

namespace eagle {

enum class Activation { Relu, Sigmoid, Linear };

double apply_activation(Activation act, double x);
// Derivative expressed through the post-activation value.
double activation_grad(Activation act, double post);

// One graph-convolution layer: act(A_norm * H * W). No bias.
struct GcnLayer {
  DenseMatrix weight;
  Activation activation = Activation::Linear;
};

GcnLayer make_gcn_layer(std::size_t in_dim, std::size_t out_dim,
                        Activation act, Rng& rng);

// Intermediates of one forward pass, enough to evaluate both gradients.
struct GcnTape {
  DenseMatrix propagated;  // A_norm * H
  DenseMatrix output;      // act(A_norm * H * W)
  const NormalizedAdjacency* a_norm = nullptr;
  const GcnLayer* layer = nullptr;
  bool valid = false;
};

DenseMatrix gcn_forward(const GcnLayer& layer, const DenseMatrix& h,
                        const NormalizedAdjacency& a_norm, GcnTape& tape);

struct GcnGradients {
  DenseMatrix weight;
  DenseMatrix input;
};

// Exact reverse-mode gradients w.r.t. the layer weight and its input.
// Consumes the tape; a second call on the same tape is a contract violation.
GcnGradients gcn_backward(GcnTape& tape, const DenseMatrix& upstream);

enum class ReadoutMode { Average, Min, Max };

std::vector<double> readout(const DenseMatrix& rows, ReadoutMode mode);
std::vector<double> readout_rows(const DenseMatrix& h,
                                 std::span<const std::size_t> row_indices,
                                 ReadoutMode mode);

// Adam with bias correction; one state instance per trained model.
class AdamState {
 public:
  explicit AdamState(double learning_rate) : lr_(learning_rate) {}

  double learning_rate() const { return lr_; }
  std::int64_t step_count() const { return step_; }

  // Updates every parameter in place. Shapes are locked in on the first
  // call; non-finite gradients raise TrainingError.
  void step(std::span<DenseMatrix* const> params,
            std::span<const DenseMatrix* const> grads);

 private:
  double lr_;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::int64_t step_ = 0;
  std::vector<DenseMatrix> m_;
  std::vector<DenseMatrix> v_;
};

}  // namespace eagle
