#pragma once

#include <cstdint>

#include "gcl/evaluation.hpp"
#include "gcl/graph.hpp"
#include "gcl/training.hpp"

namespace gcl {

struct AttackConfig {
  double perturbation_rate = 0.0;  // fraction of |E| edges to inject
  std::uint64_t seed = 0;
};

// Inserts round(rate * |E|) new undirected edges drawn uniformly from the
// non-edges. Original edges are untouched.
Graph random_edge_attack(const Graph& graph, const AttackConfig& cfg);

// Evasion evaluation: the probe is fit on clean-graph embeddings and applied
// to embeddings recomputed on the attacked graph with frozen encoder params.
double evasion_eval(const Encoder& view_a, const Encoder& view_b,
                    const DatasetBundle& clean, const Graph& attacked,
                    double beta, const ProbeConfig& probe_cfg,
                    const Split& split, bool final_activation = false);

}  // namespace gcl
