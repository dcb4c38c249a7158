#include <doctest.h>

#include <cmath>

#include "eagle/neuralcore.hpp"
#include "test_util.hpp"

using namespace eagle;

namespace {

NormalizedAdjacency identity_adjacency(std::size_t n) {
  return normalize_adjacency(SparseMatrix::from_triplets(n, n, {}));
}

// Scalar probe loss L = sum c_ij * out_ij for finite differencing.
double probe_loss(const GcnLayer& layer, const DenseMatrix& h,
                  const NormalizedAdjacency& a, const DenseMatrix& c) {
  GcnTape tape;
  const auto out = gcn_forward(layer, h, a, tape);
  double acc = 0.0;
  const auto ov = out.values();
  const auto cv = c.values();
  for (std::size_t i = 0; i < ov.size(); ++i) acc += ov[i] * cv[i];
  return acc;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

}  // namespace

TEST_CASE("gcn_forward: identity composition returns the input") {
  Rng rng(1);
  const auto h = testutil::random_dense(5, 3, rng);
  GcnLayer layer{DenseMatrix::identity(3), Activation::Linear};
  GcnTape tape;
  CHECK(gcn_forward(layer, h, identity_adjacency(5), tape) == h);
}

TEST_CASE("gcn_forward: relu zeroes all-negative pre-activations") {
  DenseMatrix h(2, 2, -1.0);
  GcnLayer layer{DenseMatrix::identity(2), Activation::Relu};
  GcnTape tape;
  const auto out = gcn_forward(layer, h, identity_adjacency(2), tape);
  for (double v : out.values()) CHECK(v == 0.0);
}

TEST_CASE("gcn_forward: matches dense oracle") {
  Rng rng(2);
  const auto adj_raw = testutil::random_symmetric_binary(12, 0.3, rng);
  const auto a = normalize_adjacency(adj_raw);
  const auto h = testutil::random_dense(12, 5, rng);
  GcnLayer layer = make_gcn_layer(5, 4, Activation::Sigmoid, rng);
  GcnTape tape;
  const auto out = gcn_forward(layer, h, a, tape);
  const auto pre = matmul(matmul(a.matrix().to_dense(), h), layer.weight);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    for (std::size_t j = 0; j < out.cols(); ++j) {
      const double expect = 1.0 / (1.0 + std::exp(-pre(i, j)));
      CHECK(out(i, j) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
}

TEST_CASE("gcn_forward: deterministic") {
  Rng rng(3);
  const auto a =
      normalize_adjacency(testutil::random_symmetric_binary(8, 0.4, rng));
  const auto h = testutil::random_dense(8, 3, rng);
  GcnLayer layer = make_gcn_layer(3, 3, Activation::Relu, rng);
  GcnTape t1, t2;
  CHECK(gcn_forward(layer, h, a, t1) == gcn_forward(layer, h, a, t2));
}

TEST_CASE("gcn_backward: zero upstream gives zero gradients") {
  Rng rng(4);
  const auto a = identity_adjacency(4);
  const auto h = testutil::random_dense(4, 3, rng);
  GcnLayer layer = make_gcn_layer(3, 2, Activation::Relu, rng);
  GcnTape tape;
  gcn_forward(layer, h, a, tape);
  const auto grads = gcn_backward(tape, DenseMatrix(4, 2));
  for (double v : grads.weight.values()) CHECK(v == 0.0);
  for (double v : grads.input.values()) CHECK(v == 0.0);
}

TEST_CASE("gcn_backward: linear layer on identity graph gives H^T upstream") {
  Rng rng(5);
  const auto h = testutil::random_dense(4, 3, rng);
  const auto upstream = testutil::random_dense(4, 2, rng);
  GcnLayer layer = make_gcn_layer(3, 2, Activation::Linear, rng);
  const auto a = identity_adjacency(4);
  GcnTape tape;
  gcn_forward(layer, h, a, tape);
  const auto grads = gcn_backward(tape, upstream);
  const auto expect = matmul_transpose_a(h, upstream);
  for (std::size_t i = 0; i < expect.rows(); ++i) {
    for (std::size_t j = 0; j < expect.cols(); ++j) {
      CHECK(grads.weight(i, j) == doctest::Approx(expect(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("gcn_backward: finite-difference check on random configurations") {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t n = 4 + rng.uniform_index(6);
    const auto a =
        normalize_adjacency(testutil::random_symmetric_binary(n, 0.4, rng));
    const auto h = testutil::random_dense(n, 3, rng);
    const Activation act = trial % 2 ? Activation::Sigmoid : Activation::Relu;
    GcnLayer layer = make_gcn_layer(3, 2, act, rng);
    const auto c = testutil::random_dense(n, 2, rng);

    GcnTape tape;
    gcn_forward(layer, h, a, tape);
    const auto grads = gcn_backward(tape, c);

    const double step = 1e-5;
    for (std::size_t i = 0; i < layer.weight.rows(); ++i) {
      for (std::size_t j = 0; j < layer.weight.cols(); ++j) {
        GcnLayer perturbed = layer;
        perturbed.weight(i, j) += step;
        const double up = probe_loss(perturbed, h, a, c);
        perturbed.weight(i, j) -= 2 * step;
        const double down = probe_loss(perturbed, h, a, c);
        CHECK(rel_err(grads.weight(i, j), (up - down) / (2 * step)) < 1e-4);
      }
    }
    for (std::size_t i = 0; i < h.rows(); ++i) {
      for (std::size_t j = 0; j < h.cols(); ++j) {
        DenseMatrix hp = h;
        hp(i, j) += step;
        const double up = probe_loss(layer, hp, a, c);
        hp(i, j) -= 2 * step;
        const double down = probe_loss(layer, hp, a, c);
        CHECK(rel_err(grads.input(i, j), (up - down) / (2 * step)) < 1e-4);
      }
    }
  }
}

TEST_CASE("gcn_backward: stale tape throws") {
  Rng rng(7);
  const auto h = testutil::random_dense(3, 2, rng);
  GcnLayer layer = make_gcn_layer(2, 2, Activation::Linear, rng);
  const auto a = identity_adjacency(3);
  GcnTape tape;
  gcn_forward(layer, h, a, tape);
  const DenseMatrix up(3, 2);
  gcn_backward(tape, up);
  CHECK_THROWS_AS(gcn_backward(tape, up), DataError);
}

TEST_CASE("readout") {
  SUBCASE("single row passes through in every mode") {
    DenseMatrix m(1, 3);
    m(0, 0) = 1.0;
    m(0, 1) = -2.0;
    m(0, 2) = 0.5;
    const std::vector<double> expect = {1.0, -2.0, 0.5};
    CHECK(readout(m, ReadoutMode::Average) == expect);
    CHECK(readout(m, ReadoutMode::Min) == expect);
    CHECK(readout(m, ReadoutMode::Max) == expect);
  }
  SUBCASE("hand case") {
    DenseMatrix m(2, 2);
    m(0, 1) = 2.0;
    m(1, 0) = 2.0;
    CHECK(readout(m, ReadoutMode::Average) == std::vector<double>{1.0, 1.0});
    CHECK(readout(m, ReadoutMode::Min) == std::vector<double>{0.0, 0.0});
    CHECK(readout(m, ReadoutMode::Max) == std::vector<double>{2.0, 2.0});
  }
  SUBCASE("random matches loop oracle") {
    Rng rng(8);
    const auto m = testutil::random_dense(50, 8, rng);
    const auto avg = readout(m, ReadoutMode::Average);
    const auto mn = readout(m, ReadoutMode::Min);
    const auto mx = readout(m, ReadoutMode::Max);
    for (std::size_t j = 0; j < 8; ++j) {
      double sum = 0.0, lo = m(0, j), hi = m(0, j);
      for (std::size_t i = 0; i < 50; ++i) {
        sum += m(i, j);
        lo = std::min(lo, m(i, j));
        hi = std::max(hi, m(i, j));
      }
      CHECK(avg[j] == doctest::Approx(sum / 50.0).epsilon(1e-12));
      CHECK(mn[j] == lo);
      CHECK(mx[j] == hi);
    }
  }
  SUBCASE("average of identical rows is the row") {
    DenseMatrix m(5, 3);
    for (std::size_t i = 0; i < 5; ++i) {
      m(i, 0) = 0.3;
      m(i, 1) = -1.25;
      m(i, 2) = 7.0;
    }
    CHECK(readout(m, ReadoutMode::Average) ==
          std::vector<double>{0.3, -1.25, 7.0});
  }
  SUBCASE("empty input throws") {
    CHECK_THROWS_AS(readout(DenseMatrix(0, 3), ReadoutMode::Average),
                    DataError);
  }
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  DenseMatrix p(2, 2, 1.5);
  const DenseMatrix g(2, 2);
  AdamState adam(0.01);
  DenseMatrix* params[] = {&p};
  const DenseMatrix* grads[] = {&g};
  adam.step(params, grads);
  for (double v : p.values()) CHECK(v == 1.5);
}

TEST_CASE("adam: first step moves by about lr") {
  // Hand evaluation: m-hat = g, v-hat = g^2, update = lr * g / (|g| + eps).
  DenseMatrix p(1, 1);
  DenseMatrix g(1, 1, 1.0);
  AdamState adam(0.001);
  DenseMatrix* params[] = {&p};
  const DenseMatrix* grads[] = {&g};
  adam.step(params, grads);
  CHECK(p(0, 0) == doctest::Approx(-0.001).epsilon(1e-4));
}

TEST_CASE("adam: descends a quadratic bowl") {
  DenseMatrix p(1, 2);
  p(0, 0) = 3.0;
  p(0, 1) = -2.0;
  AdamState adam(0.05);
  auto loss = [&] { return p(0, 0) * p(0, 0) + p(0, 1) * p(0, 1); };
  const double initial = loss();
  double after_warmup = initial;
  for (int i = 0; i < 100; ++i) {
    DenseMatrix g(1, 2);
    g(0, 0) = 2 * p(0, 0);
    g(0, 1) = 2 * p(0, 1);
    DenseMatrix* params[] = {&p};
    const DenseMatrix* grads[] = {&g};
    adam.step(params, grads);
    if (i == 9) after_warmup = loss();
  }
  CHECK(loss() < after_warmup);
  CHECK(loss() < initial);
}

TEST_CASE("adam: non-finite gradient raises training error") {
  DenseMatrix p(1, 1);
  DenseMatrix g(1, 1, std::numeric_limits<double>::quiet_NaN());
  AdamState adam(0.01);
  DenseMatrix* params[] = {&p};
  const DenseMatrix* grads[] = {&g};
  CHECK_THROWS_AS(adam.step(params, grads), TrainingError);
}
