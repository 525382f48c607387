#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcl/synth.hpp"
#include "gcl/training.hpp"
#include "test_util.hpp"

using namespace gcl;

TEST_CASE("cosmean_loss endpoint values") {
  Rng rng(1);
  const DenseMatrix z = test::random_matrix(rng, 5, 3);

  CHECK(cosmean_loss(z, z).loss == doctest::Approx(0.0).epsilon(1e-12));

  DenseMatrix neg = z;
  for (double& v : neg.data()) v = -v;
  CHECK(cosmean_loss(z, neg).loss == doctest::Approx(2.0).epsilon(1e-12));

  DenseMatrix a(2, 2, {1, 0, 0, 1});
  DenseMatrix b(2, 2, {0, 1, 1, 0});
  CHECK(cosmean_loss(a, b).loss == doctest::Approx(1.0));
}

TEST_CASE("cosmean_loss zero-norm rows contribute loss 1 and zero gradient") {
  DenseMatrix a(2, 2, {0, 0, 1, 0});
  DenseMatrix b(2, 2, {1, 0, 1, 0});
  const CosmeanResult r = cosmean_loss(a, b);
  CHECK(r.loss == doctest::Approx(0.5));  // (1 + 0)/2 shortfall from cos
  CHECK(r.d_zs(0, 0) == 0.0);
  CHECK(r.d_zs(0, 1) == 0.0);
  CHECK(r.d_zf(0, 0) == 0.0);
}

TEST_CASE("cosmean gradient is orthogonal to its own row") {
  Rng rng(2);
  const DenseMatrix zs = test::random_matrix(rng, 10, 4);
  const DenseMatrix zf = test::random_matrix(rng, 10, 4);
  const CosmeanResult r = cosmean_loss(zs, zf);
  for (std::size_t i = 0; i < 10; ++i) {
    double dot_s = 0.0, dot_f = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      dot_s += r.d_zs(i, j) * zs(i, j);
      dot_f += r.d_zf(i, j) * zf(i, j);
    }
    CHECK(std::fabs(dot_s) <= 1e-10);
    CHECK(std::fabs(dot_f) <= 1e-10);
  }
}

TEST_CASE("cosmean loss is scale invariant") {
  Rng rng(3);
  const DenseMatrix zs = test::random_matrix(rng, 8, 5);
  const DenseMatrix zf = test::random_matrix(rng, 8, 5);
  DenseMatrix scaled = zs;
  for (double& v : scaled.data()) v *= 7.25;
  CHECK(cosmean_loss(zs, zf).loss == cosmean_loss(scaled, zf).loss);
}

TEST_CASE("cosmean_loss rejects shape mismatch") {
  CHECK_THROWS_AS(cosmean_loss(DenseMatrix(2, 2), DenseMatrix(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("adam_step basics") {
  std::vector<double> theta{1.0};
  std::vector<double> zero_grad{0.0};
  AdamState st;
  adam_step({&theta}, {&zero_grad}, st, 0.1, 0.0);
  CHECK(theta[0] == 1.0);
  CHECK(st.t == 1);

  // Bias-corrected first step with g = 1.
  std::vector<double> theta2{0.0};
  std::vector<double> g{1.0};
  AdamState st2;
  adam_step({&theta2}, {&g}, st2, 0.1, 0.0);
  CHECK(theta2[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-12));
}

TEST_CASE("adam_step is deterministic") {
  std::vector<double> a{0.5, -0.25}, b{0.5, -0.25};
  std::vector<double> g{0.3, 0.7};
  AdamState sa, sb;
  for (int i = 0; i < 5; ++i) {
    adam_step({&a}, {&g}, sa, 0.01, 0.1);
    adam_step({&b}, {&g}, sb, 0.01, 0.1);
  }
  CHECK(a == b);
}

TEST_CASE("train contract: epoch count and bounds") {
  CsbmConfig cfg;
  cfg.num_nodes = 60;
  cfg.feature_dim = 8;
  cfg.seed = 4;
  const DatasetBundle ds = generate_csbm(cfg);

  TrainConfig tc;
  tc.epochs = 0;
  CHECK_THROWS_AS(train(ds, tc), std::invalid_argument);

  tc.epochs = 1;
  tc.hidden_dim = 8;
  const TrainResult r = train(ds, tc);
  CHECK(r.trace.loss.size() == 1);
  CHECK(r.trace.loss[0] >= 0.0);
  CHECK(r.trace.loss[0] <= 2.0);
}

TEST_CASE("training reduces the loss on heterophilic csbm across seeds") {
  const CsbmConfig base = heterophilic_benchmark_config(0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CsbmConfig cfg = base;
    cfg.num_nodes = 150;
    cfg.seed = seed;
    const DatasetBundle ds = generate_csbm(cfg);
    TrainConfig tc;
    tc.epochs = 40;
    tc.hidden_dim = 16;
    tc.seed = seed;
    const TrainResult r = train(ds, tc);
    CHECK(r.trace.loss.back() < r.trace.loss.front());
    for (double l : r.trace.loss) {
      CHECK(l >= 0.0);
      CHECK(l <= 2.0);
    }
  }
}

TEST_CASE("train is bitwise deterministic given the seed") {
  CsbmConfig cfg;
  cfg.num_nodes = 80;
  cfg.feature_dim = 6;
  cfg.seed = 7;
  const DatasetBundle ds = generate_csbm(cfg);
  TrainConfig tc;
  tc.epochs = 15;
  tc.hidden_dim = 8;
  tc.seed = 99;
  const TrainResult a = train(ds, tc);
  const TrainResult b = train(ds, tc);
  CHECK(a.trace.loss == b.trace.loss);
  CHECK(a.trace.embedding_variance == b.trace.embedding_variance);
  for (std::size_t l = 0; l < a.view_a.gcn.layers(); ++l) {
    CHECK(a.view_a.gcn.weights[l].data() == b.view_a.gcn.weights[l].data());
  }
}

TEST_CASE("ablation variants build the right encoder pairs") {
  CsbmConfig cfg;
  cfg.num_nodes = 40;
  cfg.feature_dim = 4;
  const DatasetBundle ds = generate_csbm(cfg);
  TrainConfig tc;
  tc.epochs = 2;
  tc.hidden_dim = 4;

  const TrainResult gm = train(ds, tc, Variant::GcnMlp);
  CHECK(gm.view_a.is_gcn);
  CHECK_FALSE(gm.view_b.is_gcn);

  const TrainResult gg = train(ds, tc, Variant::GcnGcn);
  CHECK(gg.view_a.is_gcn);
  CHECK(gg.view_b.is_gcn);
  // Independently initialized.
  CHECK(gg.view_a.gcn.weights[0].data() != gg.view_b.gcn.weights[0].data());

  const TrainResult mm = train(ds, tc, Variant::MlpMlp);
  CHECK_FALSE(mm.view_a.is_gcn);
  CHECK_FALSE(mm.view_b.is_gcn);
}
