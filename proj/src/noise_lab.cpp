#include "gcl/noise_lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace gcl {

void Histogram::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write histogram: " + path);
  out.precision(17);
  out << "bin_left,bin_right,count\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out << bin_left[i] << ',' << bin_right[i] << ',' << counts[i] << '\n';
  }
}

namespace {

nlohmann::ordered_json histogram_json(const Histogram& h) {
  nlohmann::ordered_json j;
  j["bin_left"] = h.bin_left;
  j["bin_right"] = h.bin_right;
  j["counts"] = h.counts;
  return j;
}

// JSON has no Inf; encode the NCR infinity marker as a string.
nlohmann::ordered_json ncr_json(const std::vector<double>& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (double x : v) {
    if (std::isinf(x)) {
      arr.push_back("inf");
    } else {
      arr.push_back(x);
    }
  }
  return arr;
}

}  // namespace

std::string NoiseReport::to_json() const {
  nlohmann::ordered_json j;
  j["E_k"] = e_k;
  j["ncr"] = ncr_json(ncr);
  j["proposition_stat"] = proposition_stat;
  j["correlation_histogram"] = histogram_json(correlation_histogram);
  return j.dump(2) + "\n";
}

void NoiseReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write noise report: " + path);
  out << to_json();
}

std::string SpectralReport::to_json() const {
  nlohmann::ordered_json j;
  j["eigenvalues"] = eigenvalues;
  j["frequency_energy"] = frequency_energy;
  j["E_k"] = e_k;
  j["max_deviation"] = max_deviation;
  return j.dump(2) + "\n";
}

void SpectralReport::write_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write spectral report: " + path);
  out << to_json();
}

ClassCentroids class_centroids(const DenseMatrix& x,
                               const std::vector<std::size_t>& labels,
                               std::size_t num_classes) {
  if (labels.size() != x.rows()) {
    throw std::invalid_argument("class_centroids: label count mismatch");
  }
  ClassCentroids cc;
  cc.centroids = DenseMatrix(num_classes, x.cols());
  cc.counts.assign(num_classes, 0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::size_t c = labels[i];
    if (c >= num_classes) throw std::invalid_argument("class_centroids: bad label");
    cc.counts[c]++;
    const double* row = x.row_ptr(i);
    double* dst = cc.centroids.row_ptr(c);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] += row[j];
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (cc.counts[c] == 0) {
      throw std::invalid_argument("class_centroids: empty class " + std::to_string(c));
    }
    double* dst = cc.centroids.row_ptr(c);
    for (std::size_t j = 0; j < x.cols(); ++j) {
      dst[j] /= static_cast<double>(cc.counts[c]);
    }
  }
  return cc;
}

DenseMatrix feature_noise(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                          std::size_t num_classes) {
  const ClassCentroids cc = class_centroids(x, labels, num_classes);
  DenseMatrix n(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = x.row_ptr(i);
    const double* cen = cc.centroids.row_ptr(labels[i]);
    double* dst = n.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = row[j] - cen[j];
  }
  return n;
}

namespace {

DenseMatrix propagate(const NormalizedAdjacency& adj, DenseMatrix m, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i) m = spmm(adj.matrix, m);
  return m;
}

}  // namespace

DenseMatrix structural_noise(const DenseMatrix& x,
                             const std::vector<std::size_t>& labels,
                             std::size_t num_classes,
                             const NormalizedAdjacency& adj, std::size_t k) {
  return feature_noise(propagate(adj, x, k), labels, num_classes);
}

std::vector<double> correlation_ek(const DenseMatrix& x,
                                   const std::vector<std::size_t>& labels,
                                   std::size_t num_classes,
                                   const NormalizedAdjacency& adj,
                                   std::size_t k_max) {
  const DenseMatrix noise = feature_noise(x, labels, num_classes);
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  std::vector<double> out;
  out.reserve(k_max + 1);
  // n_i^(k) is row i of A~^k N by linearity, so E_k is a row-wise dot
  // between N and the k-fold propagated N.
  DenseMatrix nk = noise;
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (k > 0) nk = spmm(adj.matrix, nk);
    double trace = 0.0;
    for (std::size_t i = 0; i < noise.data().size(); ++i) {
      trace += noise.data()[i] * nk.data()[i];
    }
    out.push_back(trace * inv_n);
  }
  return out;
}

SpectralReport spectral_ek(const DenseMatrix& x,
                           const std::vector<std::size_t>& labels,
                           std::size_t num_classes, const NormalizedAdjacency& adj,
                           std::size_t k_max, std::size_t eig_cap) {
  const std::size_t n = x.rows();
  // L~ = I - A~.
  DenseMatrix laplacian = adj.matrix.to_dense();
  for (double& v : laplacian.data()) v = -v;
  for (std::size_t i = 0; i < n; ++i) laplacian(i, i) += 1.0;

  const EigenDecomposition eig = sym_eig(laplacian, eig_cap);
  const DenseMatrix noise = feature_noise(x, labels, num_classes);
  // Fourier coefficients: (i,j) entry of W^T N.
  const DenseMatrix coeffs = matmul_at_b(eig.eigenvectors, noise);

  SpectralReport rep;
  rep.eigenvalues = eig.eigenvalues;
  rep.frequency_energy.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = coeffs.row_ptr(i);
    double e = 0.0;
    for (std::size_t j = 0; j < coeffs.cols(); ++j) e += row[j] * row[j];
    rep.frequency_energy[i] = e;
  }

  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= k_max; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sum += std::pow(1.0 - eig.eigenvalues[i], static_cast<double>(k)) *
             rep.frequency_energy[i];
    }
    rep.e_k.push_back(sum * inv_n);
  }

  const std::vector<double> direct =
      correlation_ek(x, labels, num_classes, adj, k_max);
  for (std::size_t k = 0; k <= k_max; ++k) {
    rep.max_deviation =
        std::max(rep.max_deviation, std::fabs(rep.e_k[k] - direct[k]));
  }
  return rep;
}

std::vector<double> ncr(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                        std::size_t num_classes) {
  const ClassCentroids cc = class_centroids(x, labels, num_classes);
  const DenseMatrix noise = feature_noise(x, labels, num_classes);
  std::vector<double> mean_noise(num_classes, 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* row = noise.row_ptr(i);
    double nn = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) nn += row[j] * row[j];
    mean_noise[labels[i]] += std::sqrt(nn);
  }
  std::vector<double> out(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    mean_noise[c] /= static_cast<double>(cc.counts[c]);
    const double* cen = cc.centroids.row_ptr(c);
    double cn = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) cn += cen[j] * cen[j];
    cn = std::sqrt(cn);
    out[c] = cn < 1e-12 ? std::numeric_limits<double>::infinity()
                        : mean_noise[c] / cn;
  }
  return out;
}

std::vector<double> proposition_check(const DenseMatrix& x,
                                      const std::vector<std::size_t>& labels,
                                      std::size_t num_classes,
                                      const NormalizedAdjacency& adj,
                                      std::size_t k_max) {
  if (k_max < 1) throw std::invalid_argument("proposition_check: k_max must be >= 1");
  const ClassCentroids cc = class_centroids(x, labels, num_classes);
  DenseMatrix mean_x(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* cen = cc.centroids.row_ptr(labels[i]);
    double* dst = mean_x.row_ptr(i);
    for (std::size_t j = 0; j < x.cols(); ++j) dst[j] = cen[j];
  }

  std::vector<double> out;
  DenseMatrix xk = x;
  DenseMatrix mk = mean_x;
  for (std::size_t k = 1; k <= k_max; ++k) {
    xk = spmm(adj.matrix, xk);
    mk = spmm(adj.matrix, mk);
    const DenseMatrix nk = feature_noise(xk, labels, num_classes);
    const DenseMatrix rk = feature_noise(mk, labels, num_classes);
    double stat = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const double* a = nk.row_ptr(i);
      const double* b = rk.row_ptr(i);
      double diff = 0.0, norm = 0.0;
      for (std::size_t j = 0; j < x.cols(); ++j) {
        diff += (a[j] - b[j]) * (a[j] - b[j]);
        norm += a[j] * a[j];
      }
      stat += std::sqrt(diff) / (1.0 + std::sqrt(norm));
    }
    out.push_back(stat / static_cast<double>(x.rows()));
  }
  return out;
}

std::vector<GeometryRow> lemma_geometry_sweep(double norm1, double norm2,
                                              const std::vector<double>& angle_grid) {
  if (!(norm1 > 0.0 && norm2 > 0.0)) {
    throw std::invalid_argument("lemma_geometry_sweep: norms must be positive");
  }
  std::vector<GeometryRow> out;
  out.reserve(angle_grid.size());
  for (double a : angle_grid) {
    if (a < 0.0 || a > 3.14159265358979323846 + 1e-12) {
      throw std::invalid_argument("lemma_geometry_sweep: angle outside [0,pi]");
    }
    const double sq =
        norm1 * norm1 + norm2 * norm2 + 2.0 * norm1 * norm2 * std::cos(a);
    out.push_back({a, std::sqrt(std::max(0.0, sq))});
  }
  return out;
}

Histogram cosine_histogram(const DenseMatrix& a, const DenseMatrix& b,
                           std::size_t bins) {
  if (a.rows() != b.rows()) {
    throw std::invalid_argument("cosine_histogram: row count mismatch");
  }
  if (bins < 1) throw std::invalid_argument("cosine_histogram: bins must be >= 1");
  Histogram h;
  h.counts.assign(bins, 0);
  const double width = 2.0 / static_cast<double>(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    h.bin_left.push_back(-1.0 + width * static_cast<double>(i));
    h.bin_right.push_back(-1.0 + width * static_cast<double>(i + 1));
  }
  for (double c : cosine_rows(a, b)) {
    auto bin = static_cast<long long>(std::floor((c + 1.0) / width));
    if (bin < 0) bin = 0;
    if (bin >= static_cast<long long>(bins)) bin = static_cast<long long>(bins) - 1;
    h.counts[static_cast<std::size_t>(bin)]++;
  }
  return h;
}

NoiseReport noise_report(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                         std::size_t num_classes, const NormalizedAdjacency& adj,
                         std::size_t k_max, std::size_t histogram_bins) {
  NoiseReport rep;
  rep.e_k = correlation_ek(x, labels, num_classes, adj, k_max);
  rep.ncr = ncr(x, labels, num_classes);
  if (k_max >= 1) {
    rep.proposition_stat = proposition_check(x, labels, num_classes, adj, k_max);
  }
  const DenseMatrix n0 = feature_noise(x, labels, num_classes);
  const DenseMatrix nk = structural_noise(x, labels, num_classes, adj, k_max);
  rep.correlation_histogram = cosine_histogram(n0, nk, histogram_bins);
  return rep;
}

}  // namespace gcl
