#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gcl/evaluation.hpp"
#include "gcl/synth.hpp"
#include "test_util.hpp"

using namespace gcl;

namespace {

Split even_odd_split(std::size_t n) {
  Split s;
  s.name = "s0";
  for (std::size_t i = 0; i < n; ++i) {
    (i % 2 == 0 ? s.train : s.test).push_back(i);
  }
  return s;
}

// Linearly separable one-hot embeddings per class label.
DenseMatrix one_hot_embeddings(const std::vector<std::size_t>& labels,
                               std::size_t num_classes) {
  DenseMatrix z(labels.size(), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) z(i, labels[i]) = 1.0;
  return z;
}

}  // namespace

TEST_CASE("combine_views endpoints and midpoint") {
  Rng rng(1);
  const DenseMatrix zs = test::random_matrix(rng, 6, 4);
  const DenseMatrix zf = test::random_matrix(rng, 6, 4);

  CHECK(combine_views(zs, zf, 1.0).data() == zs.data());
  CHECK(combine_views(zs, zf, 0.0).data() == zf.data());

  const DenseMatrix mid = combine_views(zs, zf, 0.5);
  for (std::size_t i = 0; i < mid.data().size(); ++i) {
    CHECK(mid.data()[i] == doctest::Approx(0.5 * (zs.data()[i] + zf.data()[i])));
  }

  // Idempotence when the views coincide.
  const DenseMatrix same = combine_views(zs, zs, 0.3);
  CHECK(same.data() == zs.data());

  CHECK_THROWS_AS(combine_views(zs, zf, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(combine_views(zs, zf, 1.5), std::invalid_argument);
}

TEST_CASE("probe reaches perfect accuracy on one-hot separable embeddings") {
  Rng rng(2);
  const std::size_t n = 40;
  const auto labels = test::random_labels(rng, n, 3);
  const DenseMatrix z = one_hot_embeddings(labels, 3);
  const Split split = even_odd_split(n);
  const ProbeResult r = linear_probe(z, labels, split, 3, ProbeConfig{});
  CHECK(r.accuracy == doctest::Approx(1.0));
}

TEST_CASE("identical embeddings on a balanced 2-class problem score one half") {
  const std::size_t n = 20;
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % 2;
  DenseMatrix z(n, 3);
  for (std::size_t i = 0; i < n; ++i) {
    z(i, 0) = 1.0;
    z(i, 1) = 2.0;
    z(i, 2) = -1.0;
  }
  Split split;
  split.name = "s0";
  for (std::size_t i = 0; i < n; ++i) {
    (i < n / 2 ? split.train : split.test).push_back(i);
  }
  const ProbeResult r = linear_probe(z, labels, split, 2, ProbeConfig{});
  CHECK(r.accuracy == doctest::Approx(0.5));
}

TEST_CASE("probe loss gradient matches finite differences") {
  Rng rng(3);
  const std::size_t n = 12, d = 5, c = 3;
  const DenseMatrix z = test::random_matrix(rng, n, d);
  const auto labels = test::random_labels(rng, n, c);
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < n; ++i) train_idx.push_back(i);

  ProbeModel model;
  model.weights = test::random_matrix(rng, d, c, 0.2);
  model.biases.assign(c, 0.0);
  for (double& b : model.biases) b = 0.2 * rng.normal();

  ProbeModel grad;
  probe_loss_and_grad(z, labels, train_idx, c, model, 0.01, &grad);

  const double eps = 1e-6;
  auto fd_check = [&](double& theta, double analytic) {
    const double orig = theta;
    theta = orig + eps;
    const double lp = probe_loss_and_grad(z, labels, train_idx, c, model, 0.01, nullptr);
    theta = orig - eps;
    const double lm = probe_loss_and_grad(z, labels, train_idx, c, model, 0.01, nullptr);
    theta = orig;
    const double fd = (lp - lm) / (2.0 * eps);
    CHECK(std::fabs(analytic - fd) /
              std::max({std::fabs(fd), std::fabs(analytic), 1e-8}) <=
          1e-4);
  };
  for (std::size_t i = 0; i < model.weights.data().size(); ++i) {
    fd_check(model.weights.data()[i], grad.weights.data()[i]);
  }
  for (std::size_t j = 0; j < c; ++j) {
    fd_check(model.biases[j], grad.biases[j]);
  }
}

TEST_CASE("probe training loss decreases monotonically at a small step size") {
  Rng rng(4);
  const std::size_t n = 30, d = 4, c = 3;
  const DenseMatrix z = test::random_matrix(rng, n, d);
  const auto labels = test::random_labels(rng, n, c);
  std::vector<std::size_t> train_idx;
  for (std::size_t i = 0; i < n; ++i) train_idx.push_back(i);

  ProbeModel model;
  model.weights = DenseMatrix(d, c);
  model.biases.assign(c, 0.0);
  double prev = probe_loss_and_grad(z, labels, train_idx, c, model, 1e-4, nullptr);
  for (int it = 0; it < 50; ++it) {
    ProbeModel grad;
    probe_loss_and_grad(z, labels, train_idx, c, model, 1e-4, &grad);
    for (std::size_t i = 0; i < model.weights.data().size(); ++i) {
      model.weights.data()[i] -= 1e-3 * grad.weights.data()[i];
    }
    for (std::size_t j = 0; j < c; ++j) model.biases[j] -= 1e-3 * grad.biases[j];
    const double cur = probe_loss_and_grad(z, labels, train_idx, c, model, 1e-4, nullptr);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("select_beta degenerate grid and discriminative view") {
  Rng rng(5);
  const std::size_t n = 60;
  const auto labels = test::random_labels(rng, n, 3);
  const DenseMatrix separable = one_hot_embeddings(labels, 3);
  const DenseMatrix noise = test::random_matrix(rng, n, 3, 0.05);

  Split split;
  split.name = "s0";
  for (std::size_t i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      split.train.push_back(i);
    } else if (i % 3 == 1) {
      split.val.push_back(i);
    } else {
      split.test.push_back(i);
    }
  }

  CHECK(select_beta(separable, noise, labels, split, 3, {0.5}, ProbeConfig{}) == 0.5);

  // Structural view carries all the signal: large beta should win.
  const double b1 = select_beta(separable, noise, labels, split, 3,
                                {0.0, 0.5, 1.0}, ProbeConfig{});
  CHECK(b1 >= 0.5);

  // Feature view carries all the signal: small beta should win.
  const double b2 = select_beta(noise, separable, labels, split, 3,
                                {0.0, 0.5, 1.0}, ProbeConfig{});
  CHECK(b2 <= 0.5);
}

TEST_CASE("select_beta breaks ties toward one half then smaller beta") {
  // Identical views: every beta gives the same validation accuracy.
  Rng rng(6);
  const std::size_t n = 30;
  const auto labels = test::random_labels(rng, n, 2);
  const DenseMatrix z = one_hot_embeddings(labels, 2);
  Split split;
  split.name = "s0";
  for (std::size_t i = 0; i < n; ++i) {
    (i % 2 == 0 ? split.train : split.val).push_back(i);
    if (i % 2 == 1) split.test.push_back(i);
  }
  const double beta = select_beta(z, z, labels, split, 2,
                                  BetaPolicy{}.grid, ProbeConfig{});
  CHECK(beta == 0.5);

  // Grid without 0.5: 0.4 and 0.6 are equally close, smaller wins.
  const double beta2 =
      select_beta(z, z, labels, split, 2, {0.2, 0.4, 0.6, 0.8}, ProbeConfig{});
  CHECK(beta2 == 0.4);
}

TEST_CASE("evaluate_multiseed report shape and determinism") {
  CsbmConfig cfg;
  cfg.num_nodes = 90;
  cfg.feature_dim = 8;
  cfg.seed = 7;
  const DatasetBundle ds = generate_csbm(cfg);

  TrainConfig tc;
  tc.epochs = 8;
  tc.hidden_dim = 8;

  EvalReport a = evaluate_multiseed(ds, tc, ProbeConfig{}, {0, 1, 2});
  CHECK(a.seeds.size() == 3);
  CHECK(a.accuracies.size() == 3);
  CHECK(a.betas.size() == 3);
  for (double acc : a.accuracies) {
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
  }
  double mean = 0.0;
  for (double acc : a.accuracies) mean += acc;
  mean /= 3.0;
  CHECK(a.mean == doctest::Approx(mean).epsilon(1e-12));

  const EvalReport b = evaluate_multiseed(ds, tc, ProbeConfig{}, {0, 1, 2});
  CHECK(a.to_json() == b.to_json());

  // Parallel execution yields byte-identical reports.
  const EvalReport c =
      evaluate_multiseed(ds, tc, ProbeConfig{}, {0, 1, 2}, BetaPolicy{},
                         Variant::GcnMlp, 3);
  CHECK(a.to_json() == c.to_json());
}

TEST_CASE("single-seed report has zero standard deviation") {
  CsbmConfig cfg;
  cfg.num_nodes = 50;
  cfg.feature_dim = 6;
  const DatasetBundle ds = generate_csbm(cfg);
  TrainConfig tc;
  tc.epochs = 3;
  tc.hidden_dim = 4;
  const EvalReport r = evaluate_multiseed(ds, tc, ProbeConfig{}, {42});
  CHECK(r.stddev == 0.0);
  CHECK(r.mean == r.accuracies[0]);
}

TEST_CASE("ablation_run labels the variant") {
  CsbmConfig cfg;
  cfg.num_nodes = 40;
  cfg.feature_dim = 4;
  const DatasetBundle ds = generate_csbm(cfg);
  TrainConfig tc;
  tc.epochs = 2;
  tc.hidden_dim = 4;
  const EvalReport r =
      ablation_run(ds, Variant::MlpMlp, tc, ProbeConfig{}, {0});
  CHECK(r.variant == variant_name(Variant::MlpMlp));
}
