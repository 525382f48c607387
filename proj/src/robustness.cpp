#include "gcl/robustness.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

#include "gcl/rng.hpp"

namespace gcl {

Graph random_edge_attack(const Graph& graph, const AttackConfig& cfg) {
  if (cfg.perturbation_rate < 0.0) {
    throw std::invalid_argument("random_edge_attack: rate must be >= 0");
  }
  const std::size_t n = graph.num_nodes;
  const auto budget = static_cast<std::size_t>(
      std::llround(cfg.perturbation_rate * static_cast<double>(graph.num_edges())));

  std::set<std::pair<std::size_t, std::size_t>> occupied(graph.edges.begin(),
                                                         graph.edges.end());
  const std::size_t total_pairs = n * (n - 1) / 2;
  if (total_pairs - occupied.size() < budget) {
    throw std::invalid_argument("random_edge_attack: not enough non-edges for budget " +
                                std::to_string(budget));
  }

  Rng rng(cfg.seed);
  std::vector<std::pair<std::size_t, std::size_t>> edges = graph.edges;
  std::vector<double> weights = graph.edge_weights;
  std::size_t added = 0;
  while (added < budget) {
    auto u = static_cast<std::size_t>(rng.uniform_index(n));
    auto v = static_cast<std::size_t>(rng.uniform_index(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (!occupied.insert({u, v}).second) continue;
    edges.emplace_back(u, v);
    weights.push_back(1.0);
    ++added;
  }
  return Graph::build(n, std::move(edges), std::move(weights));
}

double evasion_eval(const Encoder& view_a, const Encoder& view_b,
                    const DatasetBundle& clean, const Graph& attacked,
                    double beta, const ProbeConfig& probe_cfg, const Split& split,
                    bool final_activation) {
  if (attacked.num_nodes != clean.graph.num_nodes) {
    throw std::invalid_argument("evasion_eval: node set mismatch");
  }
  const NormalizedAdjacency clean_adj = normalized_adjacency(clean.graph, true);
  const DenseMatrix clean_a = view_a.forward(clean_adj, clean.features, final_activation);
  const DenseMatrix clean_b = view_b.forward(clean_adj, clean.features, final_activation);
  const DenseMatrix clean_z = combine_views(clean_a, clean_b, beta);
  const ProbeResult probe =
      linear_probe(clean_z, clean.labels, split, clean.num_classes, probe_cfg);

  const NormalizedAdjacency atk_adj = normalized_adjacency(attacked, true);
  const DenseMatrix atk_a = view_a.forward(atk_adj, clean.features, final_activation);
  const DenseMatrix atk_b = view_b.forward(atk_adj, clean.features, final_activation);
  const DenseMatrix atk_z = combine_views(atk_a, atk_b, beta);
  return probe_accuracy(probe.model, atk_z, clean.labels, split.test);
}

}  // namespace gcl
