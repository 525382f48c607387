#include "gcl/training.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gcl/numerics.hpp"

namespace gcl {

Variant variant_from_string(const std::string& s) {
  if (s == "gcn-mlp") return Variant::GcnMlp;
  if (s == "gcn-gcn") return Variant::GcnGcn;
  if (s == "mlp-mlp") return Variant::MlpMlp;
  throw std::invalid_argument("unknown variant: " + s);
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::GcnMlp: return "gcn-mlp";
    case Variant::GcnGcn: return "gcn-gcn";
    case Variant::MlpMlp: return "mlp-mlp";
  }
  return "?";
}

DenseMatrix Encoder::forward(const NormalizedAdjacency& adj, const DenseMatrix& x,
                             bool final_activation) const {
  return is_gcn ? gcn_forward(gcn, adj, x, final_activation)
                : mlp_forward(mlp, x);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (weight_decay < 0.0) throw std::invalid_argument("weight_decay must be >= 0");
  if (hidden_dim < 1) throw std::invalid_argument("hidden_dim must be >= 1");
  if (gcn_layers < 1) throw std::invalid_argument("gcn_layers must be >= 1");
  if (mlp_layers < 1) throw std::invalid_argument("mlp_layers must be >= 1");
}

CosmeanResult cosmean_loss(const DenseMatrix& z_s, const DenseMatrix& z_f) {
  if (!z_s.same_shape(z_f)) {
    throw std::invalid_argument("cosmean_loss: shape mismatch");
  }
  if (z_s.rows() == 0) throw std::invalid_argument("cosmean_loss: empty input");

  const std::size_t n = z_s.rows();
  const std::size_t h = z_s.cols();
  CosmeanResult res;
  res.d_zs = DenseMatrix(n, h);
  res.d_zf = DenseMatrix(n, h);
  double cos_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double* s = z_s.row_ptr(i);
    const double* f = z_f.row_ptr(i);
    double dot = 0.0, ns2 = 0.0, nf2 = 0.0;
    for (std::size_t j = 0; j < h; ++j) {
      dot += s[j] * f[j];
      ns2 += s[j] * s[j];
      nf2 += f[j] * f[j];
    }
    const double ns = std::sqrt(ns2);
    const double nf = std::sqrt(nf2);
    if (ns < kCosineNormGuard || nf < kCosineNormGuard) continue;  // cos = 0
    const double c = dot / (ns * nf);
    cos_sum += c;
    double* ds = res.d_zs.row_ptr(i);
    double* df = res.d_zf.row_ptr(i);
    const double inv = -1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < h; ++j) {
      ds[j] = inv * (f[j] / (ns * nf) - c * s[j] / ns2);
      df[j] = inv * (s[j] / (ns * nf) - c * f[j] / nf2);
    }
  }
  res.loss = 1.0 - cos_sum / static_cast<double>(n);
  return res;
}

void adam_step(const std::vector<std::vector<double>*>& params,
               const std::vector<const std::vector<double>*>& grads,
               AdamState& state, double lr, double weight_decay) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: params/grads count mismatch");
  }
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      state.m[i].assign(params[i]->size(), 0.0);
      state.v[i].assign(params[i]->size(), 0.0);
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: state does not match params");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& theta = *params[i];
    const auto& g0 = *grads[i];
    if (theta.size() != g0.size() || theta.size() != state.m[i].size()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch");
    }
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double g = g0[j] + weight_decay * theta[j];
      m[j] = AdamState::kBeta1 * m[j] + (1.0 - AdamState::kBeta1) * g;
      v[j] = AdamState::kBeta2 * v[j] + (1.0 - AdamState::kBeta2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      theta[j] -= lr * mhat / (std::sqrt(vhat) + AdamState::kEps);
    }
  }
}

void LossTrace::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write loss trace: " + path);
  out.precision(17);
  out << "epoch,loss,embedding_variance\n";
  for (std::size_t e = 0; e < loss.size(); ++e) {
    out << e << ',' << loss[e] << ',' << embedding_variance[e] << '\n';
  }
}

namespace {

double mean_column_variance(const DenseMatrix& z) {
  if (z.rows() == 0 || z.cols() == 0) return 0.0;
  double total = 0.0;
  for (std::size_t j = 0; j < z.cols(); ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) mean += z(i, j);
    mean /= static_cast<double>(z.rows());
    double var = 0.0;
    for (std::size_t i = 0; i < z.rows(); ++i) {
      const double d = z(i, j) - mean;
      var += d * d;
    }
    total += var / static_cast<double>(z.rows());
  }
  return total / static_cast<double>(z.cols());
}

Encoder make_encoder(bool is_gcn, Rng& rng, const DimensionSpec& dims) {
  Encoder e;
  e.is_gcn = is_gcn;
  if (is_gcn) {
    e.gcn = init_gcn(rng, dims.input_dim, dims.hidden_dim, dims.gcn_layers);
  } else {
    e.mlp = init_mlp(rng, dims.input_dim, dims.hidden_dim, dims.mlp_layers);
  }
  return e;
}

void collect_params(Encoder& e, std::vector<std::vector<double>*>& out) {
  if (e.is_gcn) {
    for (auto& w : e.gcn.weights) out.push_back(&w.data());
  } else {
    for (std::size_t l = 0; l < e.mlp.layers(); ++l) {
      out.push_back(&e.mlp.weights[l].data());
      out.push_back(&e.mlp.biases[l]);
    }
  }
}

}  // namespace

TrainResult train(const DatasetBundle& dataset, const TrainConfig& config,
                  Variant variant) {
  config.validate();
  dataset.validate();

  DimensionSpec dims;
  dims.input_dim = dataset.features.cols();
  dims.hidden_dim = config.hidden_dim;
  dims.gcn_layers = config.gcn_layers;
  dims.mlp_layers = config.mlp_layers;

  Rng master(config.seed);
  Rng rng_a = master.fork(1);
  Rng rng_b = master.fork(2);

  TrainResult res;
  const bool a_gcn = variant != Variant::MlpMlp;
  const bool b_gcn = variant == Variant::GcnGcn;
  res.view_a = make_encoder(a_gcn, rng_a, dims);
  res.view_b = make_encoder(b_gcn, rng_b, dims);

  const NormalizedAdjacency adj = normalized_adjacency(dataset.graph, true);
  const DenseMatrix& x = dataset.features;

  std::vector<std::vector<double>*> params;
  collect_params(res.view_a, params);
  collect_params(res.view_b, params);
  AdamState state;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    GcnCache gc_a, gc_b;
    MlpCache mc_a, mc_b;
    DenseMatrix z_a = res.view_a.is_gcn
                          ? gcn_forward(res.view_a.gcn, adj, x,
                                        config.final_activation, &gc_a)
                          : mlp_forward(res.view_a.mlp, x, &mc_a);
    DenseMatrix z_b = res.view_b.is_gcn
                          ? gcn_forward(res.view_b.gcn, adj, x,
                                        config.final_activation, &gc_b)
                          : mlp_forward(res.view_b.mlp, x, &mc_b);

    const CosmeanResult lr = cosmean_loss(z_a, z_b);
    if (!std::isfinite(lr.loss)) {
      throw NumericalError("non-finite loss at epoch " + std::to_string(epoch));
    }
    res.trace.loss.push_back(lr.loss);
    res.trace.embedding_variance.push_back(
        0.5 * (mean_column_variance(z_a) + mean_column_variance(z_b)));

    std::vector<DenseMatrix> ga_w;
    MlpGradients ga_m, gb_m;
    std::vector<DenseMatrix> gb_w;
    std::vector<const std::vector<double>*> grads;
    if (res.view_a.is_gcn) {
      ga_w = gcn_backward(res.view_a.gcn, gc_a, adj, lr.d_zs);
      for (const auto& g : ga_w) grads.push_back(&g.data());
    } else {
      ga_m = mlp_backward(res.view_a.mlp, mc_a, lr.d_zs);
      for (std::size_t l = 0; l < ga_m.weights.size(); ++l) {
        grads.push_back(&ga_m.weights[l].data());
        grads.push_back(&ga_m.biases[l]);
      }
    }
    if (res.view_b.is_gcn) {
      gb_w = gcn_backward(res.view_b.gcn, gc_b, adj, lr.d_zf);
      for (const auto& g : gb_w) grads.push_back(&g.data());
    } else {
      gb_m = mlp_backward(res.view_b.mlp, mc_b, lr.d_zf);
      for (std::size_t l = 0; l < gb_m.weights.size(); ++l) {
        grads.push_back(&gb_m.weights[l].data());
        grads.push_back(&gb_m.biases[l]);
      }
    }

    adam_step(params, grads, state, config.learning_rate, config.weight_decay);

    for (const auto* p : params) {
      for (double vv : *p) {
        if (!std::isfinite(vv)) {
          throw NumericalError("non-finite parameter after epoch " +
                               std::to_string(epoch));
        }
      }
    }
  }
  return res;
}

}  // namespace gcl
