#include "gcl/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gcl/rng.hpp"

namespace gcl {

void CsbmConfig::validate() const {
  if (num_nodes < num_classes) {
    throw std::invalid_argument("csbm: need at least one node per class");
  }
  if (num_classes < 1) throw std::invalid_argument("csbm: num_classes must be >= 1");
  auto prob_ok = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob_ok(intra_class_edge_prob) || !prob_ok(inter_class_edge_prob)) {
    throw std::invalid_argument("csbm: edge probabilities must lie in [0,1]");
  }
  if (feature_noise_std < 0.0) {
    throw std::invalid_argument("csbm: feature_noise_std must be >= 0");
  }
  const double s = train_ratio + val_ratio + test_ratio;
  if (std::fabs(s - 1.0) > 1e-9) {
    throw std::invalid_argument("csbm: split ratios must sum to 1");
  }
}

CsbmConfig heterophilic_benchmark_config(std::uint64_t seed) {
  CsbmConfig cfg;
  cfg.seed = seed;
  return cfg;  // defaults are the calibrated benchmark
}

namespace {

// C approximately orthonormal directions scaled by mu.
DenseMatrix class_means(Rng& rng, std::size_t num_classes, std::size_t dim,
                        double mu) {
  DenseMatrix dirs(num_classes, dim);
  for (double& v : dirs.data()) v = rng.normal();
  for (std::size_t c = 0; c < num_classes; ++c) {
    double* row = dirs.row_ptr(c);
    // Gram-Schmidt against earlier rows.
    for (std::size_t p = 0; p < c; ++p) {
      const double* prev = dirs.row_ptr(p);
      double dot = 0.0;
      for (std::size_t j = 0; j < dim; ++j) dot += row[j] * prev[j];
      for (std::size_t j = 0; j < dim; ++j) row[j] -= dot * prev[j];
    }
    double norm = 0.0;
    for (std::size_t j = 0; j < dim; ++j) norm += row[j] * row[j];
    norm = std::sqrt(norm);
    if (norm < 1e-9) {
      // Degenerate draw (only possible when C > d); fall back to a basis vector.
      for (std::size_t j = 0; j < dim; ++j) row[j] = (j == c % dim) ? 1.0 : 0.0;
      norm = 1.0;
    }
    for (std::size_t j = 0; j < dim; ++j) row[j] /= norm;
  }
  for (double& v : dirs.data()) v *= mu;
  return dirs;
}

}  // namespace

DatasetBundle generate_csbm(const CsbmConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t n = cfg.num_nodes;
  const std::size_t c = cfg.num_classes;

  // Balanced round-robin class assignment.
  std::vector<std::size_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = i % c;

  const DenseMatrix means = class_means(rng, c, cfg.feature_dim, cfg.feature_signal);
  DenseMatrix x(n, cfg.feature_dim);
  for (std::size_t i = 0; i < n; ++i) {
    const double* mean = means.row_ptr(labels[i]);
    double* row = x.row_ptr(i);
    for (std::size_t j = 0; j < cfg.feature_dim; ++j) {
      row[j] = mean[j] + cfg.feature_noise_std * rng.normal();
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double p = labels[i] == labels[j] ? cfg.intra_class_edge_prob
                                              : cfg.inter_class_edge_prob;
      if (rng.uniform() < p) edges.emplace_back(i, j);
    }
  }

  // Stratified split: shuffle within each class, then cut by the ratios.
  Split split;
  split.name = "default";
  for (std::size_t cls = 0; cls < c; ++cls) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.uniform_index(i)]);
    }
    const auto n_train =
        static_cast<std::size_t>(std::round(cfg.train_ratio * members.size()));
    const auto n_val =
        static_cast<std::size_t>(std::round(cfg.val_ratio * members.size()));
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (i < n_train) {
        split.train.push_back(members[i]);
      } else if (i < n_train + n_val) {
        split.val.push_back(members[i]);
      } else {
        split.test.push_back(members[i]);
      }
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());

  DatasetBundle ds;
  ds.graph = Graph::build(n, std::move(edges));
  ds.features = std::move(x);
  ds.labels = std::move(labels);
  ds.splits.push_back(std::move(split));
  ds.num_classes = c;
  ds.validate();
  return ds;
}

double edge_homophily(const Graph& graph, const std::vector<std::size_t>& labels) {
  if (graph.edges.empty()) {
    throw std::invalid_argument("edge_homophily: graph has no edges");
  }
  std::size_t same = 0;
  for (const auto& [u, v] : graph.edges) {
    if (labels[u] == labels[v]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(graph.edges.size());
}

}  // namespace gcl
