#pragma once

#include <string>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/matrix.hpp"
#include "gcl/rng.hpp"

namespace gcl {

// k-layer GCN weight stack, no biases.
struct GcnParams {
  std::vector<DenseMatrix> weights;  // W^(0..k-1)

  std::size_t layers() const { return weights.size(); }
};

// L-layer MLP with biases.
struct MlpParams {
  std::vector<DenseMatrix> weights;
  std::vector<std::vector<double>> biases;

  std::size_t layers() const { return weights.size(); }
};

// Per-layer activations retained for the backward pass.
struct GcnCache {
  std::vector<DenseMatrix> inputs;           // H^(0..k-1)
  std::vector<DenseMatrix> propagated;       // A~ H^(l)
  std::vector<DenseMatrix> preactivations;   // A~ H^(l) W^(l)
  bool final_activation = false;
};

struct MlpCache {
  std::vector<DenseMatrix> inputs;
  std::vector<DenseMatrix> preactivations;
};

struct DimensionSpec {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 256;
  std::size_t gcn_layers = 2;
  std::size_t mlp_layers = 1;
};

// Glorot-uniform weights, zero biases. Bit-deterministic given the rng state.
GcnParams init_gcn(Rng& rng, std::size_t input_dim, std::size_t hidden_dim,
                   std::size_t layers);
MlpParams init_mlp(Rng& rng, std::size_t input_dim, std::size_t hidden_dim,
                   std::size_t layers);

DenseMatrix gcn_forward(const GcnParams& p, const NormalizedAdjacency& adj,
                        const DenseMatrix& x, bool final_activation,
                        GcnCache* cache = nullptr);
DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x,
                        MlpCache* cache = nullptr);

// Gradients w.r.t. each weight; uses A~ symmetry for the transpose product.
std::vector<DenseMatrix> gcn_backward(const GcnParams& p, const GcnCache& cache,
                                      const NormalizedAdjacency& adj,
                                      const DenseMatrix& d_out);

struct MlpGradients {
  std::vector<DenseMatrix> weights;
  std::vector<std::vector<double>> biases;
};

MlpGradients mlp_backward(const MlpParams& p, const MlpCache& cache,
                          const DenseMatrix& d_out);

// Binary checkpoint: magic "HGCL1", dimension header, then row-major
// little-endian doubles per matrix in declaration order.
void save_checkpoint(const std::string& path, const GcnParams& gcn,
                     const MlpParams& mlp);
void load_checkpoint(const std::string& path, GcnParams& gcn, MlpParams& mlp);

}  // namespace gcl
