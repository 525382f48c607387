#pragma once

#include <cstdint>

#include "gcl/graph.hpp"

namespace gcl {

// Contextual stochastic block model with class-conditional Gaussian features.
struct CsbmConfig {
  std::size_t num_nodes = 600;
  std::size_t num_classes = 3;
  std::size_t feature_dim = 32;
  double intra_class_edge_prob = 0.01;
  double inter_class_edge_prob = 0.05;
  double feature_signal = 3.0;     // class mean separation
  double feature_noise_std = 1.0;
  std::uint64_t seed = 0;
  double train_ratio = 0.48;
  double val_ratio = 0.32;
  double test_ratio = 0.20;

  void validate() const;
};

// Heterophilic default used by the acceptance sweeps: edge homophily well
// below 0.3 and a raw-feature linear probe above 0.8.
CsbmConfig heterophilic_benchmark_config(std::uint64_t seed);

DatasetBundle generate_csbm(const CsbmConfig& cfg);

// Fraction of edges joining same-class endpoints.
double edge_homophily(const Graph& graph, const std::vector<std::size_t>& labels);

}  // namespace gcl
