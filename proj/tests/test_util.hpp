#pragma once

#include <utility>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/matrix.hpp"
#include "gcl/rng.hpp"

namespace gcl::test {

inline DenseMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols,
                                 double scale = 1.0) {
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = scale * rng.normal();
  return m;
}

inline Graph random_er_graph(Rng& rng, std::size_t n, double edge_prob) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (rng.uniform() < edge_prob) edges.emplace_back(i, j);
    }
  }
  return Graph::build(n, std::move(edges));
}

inline std::vector<std::size_t> random_labels(Rng& rng, std::size_t n,
                                              std::size_t num_classes) {
  // Every class gets at least one node.
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = i < num_classes ? i : rng.uniform_index(num_classes);
  }
  return labels;
}

}  // namespace gcl::test
