#include "gcl/encoders.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "gcl/numerics.hpp"

namespace gcl {

namespace {

DenseMatrix glorot(Rng& rng, std::size_t fan_in, std::size_t fan_out) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  DenseMatrix w(fan_in, fan_out);
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  return w;
}

}  // namespace

GcnParams init_gcn(Rng& rng, std::size_t input_dim, std::size_t hidden_dim,
                   std::size_t layers) {
  if (layers < 1) throw std::invalid_argument("init_gcn: layers must be >= 1");
  GcnParams p;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < layers; ++l) {
    p.weights.push_back(glorot(rng, in, hidden_dim));
    in = hidden_dim;
  }
  return p;
}

MlpParams init_mlp(Rng& rng, std::size_t input_dim, std::size_t hidden_dim,
                   std::size_t layers) {
  if (layers < 1) throw std::invalid_argument("init_mlp: layers must be >= 1");
  MlpParams p;
  std::size_t in = input_dim;
  for (std::size_t l = 0; l < layers; ++l) {
    p.weights.push_back(glorot(rng, in, hidden_dim));
    p.biases.emplace_back(hidden_dim, 0.0);
    in = hidden_dim;
  }
  return p;
}

DenseMatrix gcn_forward(const GcnParams& p, const NormalizedAdjacency& adj,
                        const DenseMatrix& x, bool final_activation,
                        GcnCache* cache) {
  if (cache) {
    *cache = GcnCache{};
    cache->final_activation = final_activation;
  }
  DenseMatrix h = x;
  const std::size_t k = p.layers();
  for (std::size_t l = 0; l < k; ++l) {
    DenseMatrix ah = spmm(adj.matrix, h);
    DenseMatrix pre = matmul(ah, p.weights[l]);
    const bool act = (l + 1 < k) || final_activation;
    DenseMatrix out = act ? relu(pre) : pre;
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->propagated.push_back(std::move(ah));
      cache->preactivations.push_back(std::move(pre));
    }
    h = std::move(out);
  }
  return h;
}

DenseMatrix mlp_forward(const MlpParams& p, const DenseMatrix& x, MlpCache* cache) {
  if (cache) *cache = MlpCache{};
  DenseMatrix h = x;
  const std::size_t L = p.layers();
  for (std::size_t l = 0; l < L; ++l) {
    DenseMatrix pre = matmul(h, p.weights[l]);
    for (std::size_t i = 0; i < pre.rows(); ++i) {
      double* row = pre.row_ptr(i);
      for (std::size_t j = 0; j < pre.cols(); ++j) row[j] += p.biases[l][j];
    }
    const bool act = (l + 1 < L);  // last layer linear
    DenseMatrix out = act ? relu(pre) : pre;
    if (cache) {
      cache->inputs.push_back(std::move(h));
      cache->preactivations.push_back(std::move(pre));
    }
    h = std::move(out);
  }
  return h;
}

std::vector<DenseMatrix> gcn_backward(const GcnParams& p, const GcnCache& cache,
                                      const NormalizedAdjacency& adj,
                                      const DenseMatrix& d_out) {
  const std::size_t k = p.layers();
  if (cache.inputs.size() != k) {
    throw std::invalid_argument("gcn_backward: cache does not match params");
  }
  std::vector<DenseMatrix> grads(k);
  DenseMatrix delta = d_out;
  for (std::size_t li = k; li-- > 0;) {
    const bool act = (li + 1 < k) || cache.final_activation;
    if (act) {
      const DenseMatrix mask = relu_mask(cache.preactivations[li]);
      for (std::size_t i = 0; i < delta.data().size(); ++i) {
        delta.data()[i] *= mask.data()[i];
      }
    }
    grads[li] = matmul_at_b(cache.propagated[li], delta);
    if (li > 0) {
      // dH^(l) = A~^T (delta W^T); A~ is symmetric.
      delta = spmm(adj.matrix, matmul_a_bt(delta, p.weights[li]));
    }
  }
  return grads;
}

MlpGradients mlp_backward(const MlpParams& p, const MlpCache& cache,
                          const DenseMatrix& d_out) {
  const std::size_t L = p.layers();
  if (cache.inputs.size() != L) {
    throw std::invalid_argument("mlp_backward: cache does not match params");
  }
  MlpGradients g;
  g.weights.resize(L);
  g.biases.resize(L);
  DenseMatrix delta = d_out;
  for (std::size_t li = L; li-- > 0;) {
    if (li + 1 < L) {
      const DenseMatrix mask = relu_mask(cache.preactivations[li]);
      for (std::size_t i = 0; i < delta.data().size(); ++i) {
        delta.data()[i] *= mask.data()[i];
      }
    }
    g.weights[li] = matmul_at_b(cache.inputs[li], delta);
    g.biases[li].assign(delta.cols(), 0.0);
    for (std::size_t i = 0; i < delta.rows(); ++i) {
      const double* row = delta.row_ptr(i);
      for (std::size_t j = 0; j < delta.cols(); ++j) g.biases[li][j] += row[j];
    }
    if (li > 0) delta = matmul_a_bt(delta, p.weights[li]);
  }
  return g;
}

namespace {

constexpr char kMagic[5] = {'H', 'G', 'C', 'L', '1'};

void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t read_u64(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

void write_f64_le(std::ostream& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, 8);
  write_u64(out, bits);
}

double read_f64_le(std::istream& in) {
  const std::uint64_t bits = read_u64(in);
  double d;
  std::memcpy(&d, &bits, 8);
  return d;
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  write_u64(out, m.rows());
  write_u64(out, m.cols());
  for (double v : m.data()) write_f64_le(out, v);
}

DenseMatrix read_matrix(std::istream& in) {
  const std::size_t rows = read_u64(in);
  const std::size_t cols = read_u64(in);
  DenseMatrix m(rows, cols);
  for (double& v : m.data()) v = read_f64_le(in);
  return m;
}

}  // namespace

void save_checkpoint(const std::string& path, const GcnParams& gcn,
                     const MlpParams& mlp) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, 5);
  write_u64(out, gcn.layers());
  write_u64(out, mlp.layers());
  for (const auto& w : gcn.weights) write_matrix(out, w);
  for (std::size_t l = 0; l < mlp.layers(); ++l) {
    write_matrix(out, mlp.weights[l]);
    write_u64(out, mlp.biases[l].size());
    for (double b : mlp.biases[l]) write_f64_le(out, b);
  }
}

void load_checkpoint(const std::string& path, GcnParams& gcn, MlpParams& mlp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  char magic[5];
  in.read(magic, 5);
  if (!in || std::memcmp(magic, kMagic, 5) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  const std::size_t k = read_u64(in);
  const std::size_t L = read_u64(in);
  gcn = GcnParams{};
  mlp = MlpParams{};
  for (std::size_t l = 0; l < k; ++l) gcn.weights.push_back(read_matrix(in));
  for (std::size_t l = 0; l < L; ++l) {
    mlp.weights.push_back(read_matrix(in));
    const std::size_t bn = read_u64(in);
    std::vector<double> b(bn);
    for (double& v : b) v = read_f64_le(in);
    mlp.biases.push_back(std::move(b));
  }
  if (!in) throw std::runtime_error("truncated checkpoint: " + path);
}

}  // namespace gcl
