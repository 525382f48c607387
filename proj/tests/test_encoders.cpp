#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>

#include "gcl/encoders.hpp"
#include "gcl/numerics.hpp"
#include "gcl/training.hpp"
#include "test_util.hpp"

using namespace gcl;

TEST_CASE("init is deterministic and bounded") {
  Rng r1(123), r2(123), r3(124);
  const GcnParams a = init_gcn(r1, 10, 6, 2);
  const GcnParams b = init_gcn(r2, 10, 6, 2);
  const GcnParams c = init_gcn(r3, 10, 6, 2);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(a.weights[l].data() == b.weights[l].data());
  }
  bool any_diff = false;
  for (std::size_t l = 0; l < 2; ++l) {
    if (a.weights[l].data() != c.weights[l].data()) any_diff = true;
  }
  CHECK(any_diff);

  for (std::size_t l = 0; l < 2; ++l) {
    const double fan_in = l == 0 ? 10.0 : 6.0;
    const double bound = std::sqrt(6.0 / (fan_in + 6.0));
    for (double v : a.weights[l].data()) {
      CHECK(std::fabs(v) <= bound);
    }
  }

  Rng r4(9), r5(9);
  const MlpParams m1 = init_mlp(r4, 5, 4, 2);
  const MlpParams m2 = init_mlp(r5, 5, 4, 2);
  CHECK(m1.weights[0].data() == m2.weights[0].data());
  for (const auto& b0 : m1.biases) {
    for (double v : b0) CHECK(v == 0.0);
  }
}

TEST_CASE("gcn_forward identity cases") {
  // Single self-looped node, W = I, nonnegative x.
  const Graph g1 = Graph::build(1, {});
  const NormalizedAdjacency adj1 = normalized_adjacency(g1, true);
  GcnParams p;
  p.weights.push_back(DenseMatrix::identity(3));
  const DenseMatrix x1(1, 3, {1, 2, 3});
  const DenseMatrix z1 = gcn_forward(p, adj1, x1, false);
  CHECK(z1.data() == x1.data());

  // 2-node path with self-loops: A~ is all 0.5.
  const Graph g2 = Graph::build(2, {{0, 1}});
  const NormalizedAdjacency adj2 = normalized_adjacency(g2, true);
  GcnParams p2;
  p2.weights.push_back(DenseMatrix::identity(2));
  const DenseMatrix x2(2, 2, {2, 0, 0, 2});
  const DenseMatrix z2 = gcn_forward(p2, adj2, x2, false);
  for (double v : z2.data()) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gcn_forward matches dense recomputation") {
  Rng rng(21);
  const Graph g = test::random_er_graph(rng, 12, 0.3);
  const NormalizedAdjacency adj = normalized_adjacency(g, true);
  Rng init_rng(5);
  const GcnParams p = init_gcn(init_rng, 4, 3, 2);
  const DenseMatrix x = test::random_matrix(rng, 12, 4);

  const DenseMatrix z = gcn_forward(p, adj, x, false);

  const DenseMatrix dense_adj = adj.matrix.to_dense();
  DenseMatrix h = x;
  h = relu(matmul(matmul(dense_adj, h), p.weights[0]));
  h = matmul(matmul(dense_adj, h), p.weights[1]);
  for (std::size_t i = 0; i < z.data().size(); ++i) {
    CHECK(std::fabs(z.data()[i] - h.data()[i]) <= 1e-12);
  }
}

TEST_CASE("mlp_forward basics") {
  MlpParams p;
  p.weights.push_back(DenseMatrix::identity(2));
  p.biases.push_back({0.0, 0.0});
  const DenseMatrix x(2, 2, {1, -2, 3, 4});
  CHECK(mlp_forward(p, x).data() == x.data());

  p.biases[0] = {7.0, -1.0};
  const DenseMatrix zeros(3, 2);
  const DenseMatrix z = mlp_forward(p, zeros);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(z(i, 0) == 7.0);
    CHECK(z(i, 1) == -1.0);
  }
}

TEST_CASE("two-layer mlp matches direct recomputation") {
  Rng rng(31);
  Rng init_rng(8);
  const MlpParams p = init_mlp(init_rng, 5, 4, 2);
  const DenseMatrix x = test::random_matrix(rng, 9, 5);
  const DenseMatrix z = mlp_forward(p, x);

  DenseMatrix h = matmul(x, p.weights[0]);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) += p.biases[0][j];
  }
  h = relu(h);
  h = matmul(h, p.weights[1]);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) += p.biases[1][j];
  }
  for (std::size_t i = 0; i < z.data().size(); ++i) {
    CHECK(std::fabs(z.data()[i] - h.data()[i]) <= 1e-12);
  }
}

TEST_CASE("gcn_backward zero and closed-form cases") {
  Rng rng(41);
  const Graph g = test::random_er_graph(rng, 8, 0.4);
  const NormalizedAdjacency adj = normalized_adjacency(g, true);
  Rng init_rng(3);
  const GcnParams p = init_gcn(init_rng, 3, 2, 1);
  const DenseMatrix x = test::random_matrix(rng, 8, 3);

  GcnCache cache;
  gcn_forward(p, adj, x, false, &cache);

  const DenseMatrix zero(8, 2);
  auto grads = gcn_backward(p, cache, adj, zero);
  for (double v : grads[0].data()) CHECK(v == 0.0);

  const DenseMatrix dz = test::random_matrix(rng, 8, 2);
  grads = gcn_backward(p, cache, adj, dz);
  const DenseMatrix expect = matmul_at_b(spmm(adj.matrix, x), dz);
  for (std::size_t i = 0; i < expect.data().size(); ++i) {
    CHECK(std::fabs(grads[0].data()[i] - expect.data()[i]) <= 1e-12);
  }
}

TEST_CASE("mlp_backward closed form for one linear layer") {
  Rng rng(51);
  Rng init_rng(4);
  const MlpParams p = init_mlp(init_rng, 4, 3, 1);
  const DenseMatrix x = test::random_matrix(rng, 6, 4);
  MlpCache cache;
  mlp_forward(p, x, &cache);

  const DenseMatrix dz = test::random_matrix(rng, 6, 3);
  const MlpGradients g = mlp_backward(p, cache, dz);
  const DenseMatrix expect = matmul_at_b(x, dz);
  for (std::size_t i = 0; i < expect.data().size(); ++i) {
    CHECK(std::fabs(g.weights[0].data()[i] - expect.data()[i]) <= 1e-12);
  }
  for (std::size_t j = 0; j < 3; ++j) {
    double col = 0.0;
    for (std::size_t i = 0; i < 6; ++i) col += dz(i, j);
    CHECK(std::fabs(g.biases[0][j] - col) <= 1e-12);
  }
}

TEST_CASE("encoder gradients match finite differences through the cosmean loss") {
  // Full model: GCN view vs MLP view, central differences per parameter.
  Rng rng(61);
  for (int trial = 0; trial < 4; ++trial) {
    const std::size_t n = 6 + trial;
    const std::size_t d = 4;
    const std::size_t h = 3;
    const std::size_t k = 1 + trial % 3;
    const Graph g = test::random_er_graph(rng, n, 0.4);
    const NormalizedAdjacency adj = normalized_adjacency(g, true);
    const DenseMatrix x = test::random_matrix(rng, n, d);
    Rng init_rng(100 + trial);
    GcnParams gcn = init_gcn(init_rng, d, h, k);
    MlpParams mlp = init_mlp(init_rng, d, h, 1);

    auto loss_fn = [&]() {
      return cosmean_loss(gcn_forward(gcn, adj, x, false), mlp_forward(mlp, x)).loss;
    };

    GcnCache gc;
    MlpCache mc;
    const DenseMatrix zs = gcn_forward(gcn, adj, x, false, &gc);
    const DenseMatrix zf = mlp_forward(mlp, x, &mc);
    const CosmeanResult cr = cosmean_loss(zs, zf);
    const auto gcn_grads = gcn_backward(gcn, gc, adj, cr.d_zs);
    const MlpGradients mlp_grads = mlp_backward(mlp, mc, cr.d_zf);

    const double eps = 1e-5;
    auto check_tensor = [&](std::vector<double>& theta, const std::vector<double>& grad) {
      for (std::size_t i = 0; i < theta.size(); ++i) {
        const double orig = theta[i];
        theta[i] = orig + eps;
        const double lp = loss_fn();
        theta[i] = orig - eps;
        const double lm = loss_fn();
        theta[i] = orig;
        const double fd = (lp - lm) / (2.0 * eps);
        CHECK(std::fabs(grad[i] - fd) /
                  std::max({std::fabs(fd), std::fabs(grad[i]), 1e-6}) <=
              1e-4);
      }
    };
    for (std::size_t l = 0; l < k; ++l) {
      check_tensor(gcn.weights[l].data(), gcn_grads[l].data());
    }
    check_tensor(mlp.weights[0].data(), mlp_grads.weights[0].data());
    check_tensor(mlp.biases[0], mlp_grads.biases[0]);
  }
}

TEST_CASE("checkpoint round trip") {
  Rng rng(71);
  GcnParams gcn = init_gcn(rng, 7, 5, 2);
  MlpParams mlp = init_mlp(rng, 7, 5, 1);
  mlp.biases[0][2] = 0.125;

  const std::string path =
      (std::filesystem::temp_directory_path() /
       ("gcl_ckpt_" + std::to_string(::getpid()) + ".bin")).string();
  save_checkpoint(path, gcn, mlp);
  GcnParams gcn2;
  MlpParams mlp2;
  load_checkpoint(path, gcn2, mlp2);
  std::filesystem::remove(path);

  REQUIRE(gcn2.layers() == 2);
  REQUIRE(mlp2.layers() == 1);
  for (std::size_t l = 0; l < 2; ++l) {
    CHECK(gcn2.weights[l].data() == gcn.weights[l].data());
  }
  CHECK(mlp2.weights[0].data() == mlp.weights[0].data());
  CHECK(mlp2.biases[0] == mlp.biases[0]);
}
