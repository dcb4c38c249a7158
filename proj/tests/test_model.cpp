#include <doctest.h>

#include <cmath>

#include "eagle/model.hpp"
#include "test_util.hpp"

using namespace eagle;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

struct Fixture {
  std::size_t n;
  DenseMatrix attrs;
  std::vector<NormalizedAdjacency> adjs;
  std::vector<DenseMatrix> adj_targets;
  std::vector<ScoredPair> pairs;
  EagleParams params;
};

Fixture make_fixture(std::uint64_t seed, std::size_t n, std::size_t paths,
                     ReadoutMode readout) {
  Rng rng(seed);
  Fixture f;
  f.n = n;
  f.attrs = testutil::random_dense(n, 3, rng);
  for (std::size_t m = 0; m < paths; ++m) {
    auto raw = testutil::random_symmetric_binary(n, 0.4, rng);
    f.adj_targets.push_back(raw.to_dense());
    for (std::size_t i = 0; i < n; ++i) f.adj_targets.back()(i, i) = 1.0;
    f.adjs.push_back(normalize_adjacency(raw));
  }
  for (std::size_t k = 0; k < 4; ++k) {
    ScoredPair pair;
    pair.target = rng.uniform_index(n);
    for (int tries = 0; pair.members.size() < 2 && tries < 20; ++tries) {
      const std::size_t cand = rng.uniform_index(n);
      if (cand != pair.target &&
          std::find(pair.members.begin(), pair.members.end(), cand) ==
              pair.members.end()) {
        pair.members.push_back(cand);
      }
    }
    pair.label = k % 2 ? 0.0 : 1.0;
    f.pairs.push_back(std::move(pair));
  }
  EagleHyperParams hp;
  hp.embed_dim = 3;
  hp.hidden_dim = 4;
  hp.readout = readout;
  f.params = init_eagle_params(3, paths, hp, seed + 1);
  return f;
}

double full_loss(const EagleParams& params, const Fixture& f) {
  const auto fwd = eagle_forward(params, f.attrs, f.adjs, f.pairs);
  std::vector<double> labels;
  for (const auto& p : f.pairs) labels.push_back(p.label);
  const double l_con = loss_contrastive(fwd.pair_scores, labels);
  const double l_gae = loss_gae(f.adj_targets, fwd.struct_recon, f.attrs,
                                fwd.attr_recon, params.hp.alpha,
                                params.hp.beta);
  return loss_total(l_gae, l_con, params.hp.gamma);
}

}  // namespace

TEST_CASE("init_eagle_params: shapes, determinism, per-path distinctness") {
  EagleHyperParams hp;
  hp.embed_dim = 5;
  hp.hidden_dim = 7;
  const auto p = init_eagle_params(4, 2, hp, 9);
  REQUIRE(p.paths.size() == 2);
  for (const auto& pp : p.paths) {
    CHECK(pp.encoder1.weight.rows() == 4);
    CHECK(pp.encoder1.weight.cols() == 7);
    CHECK(pp.encoder2.weight.rows() == 7);
    CHECK(pp.encoder2.weight.cols() == 5);
    CHECK(pp.attr_decoder.weight.rows() == 5);
    CHECK(pp.attr_decoder.weight.cols() == 4);
    CHECK(pp.encoder1.activation == Activation::Relu);
    CHECK(pp.encoder2.activation == Activation::Linear);
    CHECK(pp.attr_decoder.activation == Activation::Relu);
  }
  CHECK(p.disc_weight.rows() == 5);
  CHECK(p.disc_weight.cols() == 5);
  CHECK(p.paths[0].encoder1.weight != p.paths[1].encoder1.weight);

  const auto q = init_eagle_params(4, 2, hp, 9);
  CHECK(p.paths[1].encoder2.weight == q.paths[1].encoder2.weight);
  CHECK(p.disc_weight == q.disc_weight);

  CHECK_THROWS_AS(init_eagle_params(0, 2, hp, 9), ConfigError);
  CHECK_THROWS_AS(init_eagle_params(4, 0, hp, 9), ConfigError);
}

TEST_CASE("decode_struct") {
  SUBCASE("zero embeddings give the all-0.5 matrix") {
    const auto out = decode_struct(DenseMatrix(4, 3));
    for (double v : out.values()) CHECK(v == 0.5);
  }
  SUBCASE("matches elementwise sigmoid of the gram matrix") {
    Rng rng(12);
    const auto h = testutil::random_dense(6, 3, rng);
    const auto out = decode_struct(h);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double dot = 0.0;
        for (std::size_t k = 0; k < 3; ++k) dot += h(i, k) * h(j, k);
        CHECK(out(i, j) == doctest::Approx(sigmoid(dot)).epsilon(1e-12));
        CHECK(out(i, j) > 0.0);
        CHECK(out(i, j) < 1.0);
      }
    }
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) CHECK(out(i, j) == out(j, i));
    }
  }
  SUBCASE("non-finite input throws") {
    DenseMatrix h(2, 2);
    h(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(decode_struct(h), DataError);
  }
}

TEST_CASE("discriminate") {
  SUBCASE("identity weight reduces to the dot product") {
    const std::vector<double> u = {1.0, -2.0, 0.5};
    const std::vector<double> v = {0.5, 1.0, 2.0};
    const double expect = sigmoid(1.0 * 0.5 - 2.0 * 1.0 + 0.5 * 2.0);
    CHECK(discriminate(DenseMatrix::identity(3), u, v) ==
          doctest::Approx(expect).epsilon(1e-15));
  }
  SUBCASE("hand bilinear form") {
    DenseMatrix w(2, 2);
    w(0, 0) = 1.0;
    w(0, 1) = 2.0;
    w(1, 0) = -1.0;
    w(1, 1) = 0.5;
    const std::vector<double> u = {1.0, 1.0};
    const std::vector<double> v = {2.0, -1.0};
    // u^T W v = (1*1 + 1*-1)*2 + (1*2 + 1*0.5)*-1 = -2.5
    CHECK(discriminate(w, u, v) ==
          doctest::Approx(sigmoid(-2.5)).epsilon(1e-15));
  }
  SUBCASE("dimension mismatch throws") {
    const std::vector<double> u = {1.0, 2.0};
    CHECK_THROWS_AS(discriminate(DenseMatrix::identity(3), u, u), DataError);
  }
}

TEST_CASE("loss_contrastive") {
  SUBCASE("chance scores give log 2 per pair") {
    const std::vector<double> s = {0.5, 0.5};
    const std::vector<double> y = {1.0, 0.0};
    CHECK(loss_contrastive(s, y) ==
          doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  }
  SUBCASE("clamping keeps extreme scores finite") {
    const std::vector<double> s = {0.0, 1.0};
    const std::vector<double> y = {1.0, 0.0};
    const double expect = -2.0 * std::log(kScoreClamp);
    CHECK(loss_contrastive(s, y) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(std::isfinite(loss_contrastive(s, y)));
  }
  SUBCASE("random batch matches loop oracle") {
    Rng rng(3);
    std::vector<double> s, y;
    for (int i = 0; i < 10; ++i) {
      s.push_back(0.05 + 0.9 * rng.uniform01());
      y.push_back(i % 2 ? 1.0 : 0.0);
    }
    double expect = 0.0;
    for (int i = 0; i < 10; ++i) {
      expect -= y[i] * std::log(s[i]) + (1 - y[i]) * std::log(1 - s[i]);
    }
    CHECK(loss_contrastive(s, y) == doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("invalid batches throw") {
    const std::vector<double> s = {0.5};
    const std::vector<double> y = {1.0, 0.0};
    CHECK_THROWS_AS(loss_contrastive(s, y), DataError);
    CHECK_THROWS_AS(loss_contrastive({}, {}), DataError);
  }
}

TEST_CASE("loss_gae and loss_total") {
  Rng rng(4);
  const auto x = testutil::random_dense(5, 3, rng);
  const auto a = testutil::random_dense(5, 5, rng);

  SUBCASE("perfect reconstruction is zero") {
    CHECK(loss_gae({a, a}, a, x, {x, x}, 0.8, 0.2) == 0.0);
  }
  SUBCASE("weighted sum over paths") {
    const auto a_hat = testutil::random_dense(5, 5, rng);
    const auto x_hat1 = testutil::random_dense(5, 3, rng);
    const auto x_hat2 = testutil::random_dense(5, 3, rng);
    const auto a2 = testutil::random_dense(5, 5, rng);
    const double expect = 0.7 * (frobenius_sq(a, a_hat) +
                                 frobenius_sq(a2, a_hat)) +
                          0.3 * (frobenius_sq(x, x_hat1) +
                                 frobenius_sq(x, x_hat2));
    CHECK(loss_gae({a, a2}, a_hat, x, {x_hat1, x_hat2}, 0.7, 0.3) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("path count mismatch throws") {
    CHECK_THROWS_AS(loss_gae({a}, a, x, {x, x}, 0.8, 0.2), DataError);
  }
  SUBCASE("total combines with gamma") {
    CHECK(loss_total(2.0, 3.0, 0.3) == doctest::Approx(2.9).epsilon(1e-15));
  }
}

TEST_CASE("encode agrees with the forward pass and the layer chain") {
  const auto f = make_fixture(21, 7, 2, ReadoutMode::Average);
  const auto h = encode(f.params, f.attrs, f.adjs);
  const auto fwd = eagle_forward(f.params, f.attrs, f.adjs, {});
  CHECK(h == fwd.fused);

  // Manual per-path chain, fused by average.
  DenseMatrix expect(f.n, f.params.hp.embed_dim);
  for (const auto& pp : f.params.paths) {
    const std::size_t m = &pp - f.params.paths.data();
    GcnTape t1, t2;
    const auto h1 = gcn_forward(pp.encoder1, f.attrs, f.adjs[m], t1);
    const auto h2 = gcn_forward(pp.encoder2, h1, f.adjs[m], t2);
    CHECK(fwd.path_embeddings[m] == h2);
    for (std::size_t i = 0; i < expect.values().size(); ++i) {
      expect.values()[i] += h2.values()[i] / 2.0;
    }
  }
  for (std::size_t i = 0; i < expect.values().size(); ++i) {
    CHECK(h.values()[i] ==
          doctest::Approx(expect.values()[i]).epsilon(1e-12));
  }
}

TEST_CASE("eagle_forward: pair scores match manual readout + discriminate") {
  for (ReadoutMode mode :
       {ReadoutMode::Average, ReadoutMode::Min, ReadoutMode::Max}) {
    const auto f = make_fixture(33, 8, 2, mode);
    const auto fwd = eagle_forward(f.params, f.attrs, f.adjs, f.pairs);
    REQUIRE(fwd.pair_scores.size() == f.pairs.size());
    for (std::size_t k = 0; k < f.pairs.size(); ++k) {
      const auto h_inst =
          readout_rows(fwd.fused, f.pairs[k].members, mode);
      const double expect = discriminate(f.params.disc_weight,
                                         fwd.fused.row(f.pairs[k].target),
                                         h_inst);
      CHECK(fwd.pair_scores[k] == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("eagle_backward: finite-difference check over every parameter") {
  int configs = 0;
  for (ReadoutMode mode : {ReadoutMode::Average, ReadoutMode::Max}) {
    for (std::uint64_t seed : {101u, 202u}) {
      ++configs;
      Fixture f = make_fixture(seed, 6, 2, mode);
      auto fwd = eagle_forward(f.params, f.attrs, f.adjs, f.pairs);
      const auto grads =
          eagle_backward(f.params, fwd, f.attrs, f.adjs, f.adj_targets,
                         f.pairs);

      auto analytic = grads.trainable();
      auto slots = f.params.trainable();
      REQUIRE(analytic.size() == slots.size());

      const double step = 1e-5;
      for (std::size_t p = 0; p < slots.size(); ++p) {
        DenseMatrix& w = *slots[p];
        for (std::size_t i = 0; i < w.rows(); ++i) {
          for (std::size_t j = 0; j < w.cols(); ++j) {
            const double saved = w(i, j);
            w(i, j) = saved + step;
            const double up = full_loss(f.params, f);
            w(i, j) = saved - step;
            const double down = full_loss(f.params, f);
            w(i, j) = saved;
            const double fd = (up - down) / (2 * step);
            CHECK(rel_err((*analytic[p])(i, j), fd) < 1e-4);
          }
        }
      }
    }
  }
  CHECK(configs == 4);
}

TEST_CASE("anomaly_score: replay against a hand computation") {
  const auto f = make_fixture(55, 7, 2, ReadoutMode::Average);
  const auto fwd = eagle_forward(f.params, f.attrs, f.adjs, f.pairs);
  const auto& hp = f.params.hp;
  for (std::size_t v = 0; v < f.n; ++v) {
    double se = 0.0, ae = 0.0;
    for (std::size_t m = 0; m < 2; ++m) {
      se += row_l2(f.adj_targets[m], fwd.struct_recon, v);
      ae += row_l2(f.attrs, fwd.attr_recon[m], v);
    }
    const double expect =
        hp.alpha * se / 2.0 + hp.beta * ae / 2.0 + hp.gamma * (0.2 - 0.9);
    CHECK(anomaly_score(v, fwd, f.attrs, f.adj_targets, 0.9, 0.2, hp) ==
          doctest::Approx(expect).epsilon(1e-12));
    // Missing discrimination scores drop the contrastive term.
    const double base =
        anomaly_score(v, fwd, f.attrs, f.adj_targets, std::nullopt,
                      std::nullopt, hp);
    CHECK(base ==
          doctest::Approx(hp.alpha * se / 2.0 + hp.beta * ae / 2.0)
              .epsilon(1e-12));
  }
}

TEST_CASE("anomaly_score: swapped-attribute node scores above its peers") {
  // A community-structured graph where one node's attributes are replaced
  // by a far row should reconstruct worse at that node.
  Rng rng(77);
  const std::size_t n = 20;
  auto raw = testutil::random_symmetric_binary(n, 0.3, rng);
  DenseMatrix attrs(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) attrs(i, j) = 0.1 * rng.normal();
  }
  // Outlier attributes at node 3.
  for (std::size_t j = 0; j < 4; ++j) attrs(3, j) = 5.0;

  EagleHyperParams hp;
  hp.embed_dim = 4;
  hp.hidden_dim = 4;
  hp.gamma = 0.0;
  auto params = init_eagle_params(4, 1, hp, 5);
  std::vector<NormalizedAdjacency> adjs = {normalize_adjacency(raw)};
  std::vector<DenseMatrix> targets = {raw.to_dense()};
  const auto fwd = eagle_forward(params, attrs, adjs, {});
  const double outlier = anomaly_score(3, fwd, attrs, targets, std::nullopt,
                                       std::nullopt, hp);
  double mean_rest = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    if (v != 3) mean_rest += anomaly_score(v, fwd, attrs, targets,
                                           std::nullopt, std::nullopt, hp);
  }
  mean_rest /= static_cast<double>(n - 1);
  CHECK(outlier > mean_rest);
}
