#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gcl/encoders.hpp"
#include "gcl/graph.hpp"
#include "gcl/matrix.hpp"

namespace gcl {

enum class Variant { GcnMlp, GcnGcn, MlpMlp };

Variant variant_from_string(const std::string& s);
std::string variant_name(Variant v);

// One view-generation encoder; either a GCN or an MLP.
struct Encoder {
  bool is_gcn = false;
  GcnParams gcn;
  MlpParams mlp;

  DenseMatrix forward(const NormalizedAdjacency& adj, const DenseMatrix& x,
                      bool final_activation) const;
};

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  std::size_t hidden_dim = 256;
  std::size_t gcn_layers = 2;
  std::size_t mlp_layers = 1;
  bool final_activation = false;

  void validate() const;
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;

  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::size_t t = 0;
};

struct CosmeanResult {
  double loss = 0.0;
  DenseMatrix d_zs;
  DenseMatrix d_zf;
};

// L = 1 - (1/N) sum_i cos(z_s_i, z_f_i), with exact analytic gradients.
// Rows with norm below the guard contribute loss 1 and zero gradient.
CosmeanResult cosmean_loss(const DenseMatrix& z_s, const DenseMatrix& z_f);

// Standard Adam update with bias correction; weight decay is added to the
// gradient as an L2 term. params and grads are parallel flat tensors.
void adam_step(const std::vector<std::vector<double>*>& params,
               const std::vector<const std::vector<double>*>& grads,
               AdamState& state, double lr, double weight_decay);

struct LossTrace {
  std::vector<double> loss;
  std::vector<double> embedding_variance;

  void write_csv(const std::string& path) const;
};

struct TrainResult {
  Encoder view_a;  // structural view for gcn-mlp
  Encoder view_b;
  LossTrace trace;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Full-batch joint training of both encoders under the cosmean objective.
// Deterministic given config.seed.
TrainResult train(const DatasetBundle& dataset, const TrainConfig& config,
                  Variant variant = Variant::GcnMlp);

}  // namespace gcl
