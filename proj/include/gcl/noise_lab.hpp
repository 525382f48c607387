#pragma once

#include <string>
#include <vector>

#include "gcl/graph.hpp"
#include "gcl/matrix.hpp"
#include "gcl/numerics.hpp"

namespace gcl {

struct ClassCentroids {
  DenseMatrix centroids;             // C x d
  std::vector<std::size_t> counts;   // per class
};

struct Histogram {
  std::vector<double> bin_left;
  std::vector<double> bin_right;
  std::vector<std::size_t> counts;

  void write_csv(const std::string& path) const;
};

struct NoiseReport {
  std::vector<double> e_k;               // E_0..E_kmax
  std::vector<double> ncr;                // per class; +inf marker possible
  std::vector<double> proposition_stat;   // index k-1 holds the stat for hop k
  Histogram correlation_histogram;        // cos(n_i, n_i^(k_max))

  std::string to_json() const;
  void write_json(const std::string& path) const;
};

struct SpectralReport {
  std::vector<double> eigenvalues;
  std::vector<double> frequency_energy;  // per eigen-index: sum_j m_hat_j(i)^2
  std::vector<double> e_k;               // spectral E_0..E_kmax
  double max_deviation = 0.0;            // vs direct computation

  std::string to_json() const;
  void write_json(const std::string& path) const;
};

ClassCentroids class_centroids(const DenseMatrix& x,
                               const std::vector<std::size_t>& labels,
                               std::size_t num_classes);

// Row i = x_i - empirical centroid of the class of node i.
DenseMatrix feature_noise(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                          std::size_t num_classes);

// Feature noise of A~^k X; k = 0 reduces to feature_noise.
DenseMatrix structural_noise(const DenseMatrix& x,
                             const std::vector<std::size_t>& labels,
                             std::size_t num_classes,
                             const NormalizedAdjacency& adj, std::size_t k);

// E_k = (1/N) sum_i <n_i, n_i^(k)> for k = 0..k_max, via the trace form
// with N^(k) = A~^k N.
std::vector<double> correlation_ek(const DenseMatrix& x,
                                   const std::vector<std::size_t>& labels,
                                   std::size_t num_classes,
                                   const NormalizedAdjacency& adj,
                                   std::size_t k_max);

// Closed-form E_k from the eigendecomposition of I - A~, with the deviation
// from the direct computation reported.
SpectralReport spectral_ek(const DenseMatrix& x,
                           const std::vector<std::size_t>& labels,
                           std::size_t num_classes, const NormalizedAdjacency& adj,
                           std::size_t k_max, std::size_t eig_cap = kEigDefaultCap);

// Per class: mean noise norm / centroid norm; +infinity when the centroid
// norm is below 1e-12.
std::vector<double> ncr(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                        std::size_t num_classes);

// Per k in 1..k_max: mean_i ||n_i^(k) - r_i|| / (1 + ||n_i^(k)||), where r_i is
// row i of the feature noise of A~^k Xbar. Diagnostic only.
std::vector<double> proposition_check(const DenseMatrix& x,
                                      const std::vector<std::size_t>& labels,
                                      std::size_t num_classes,
                                      const NormalizedAdjacency& adj,
                                      std::size_t k_max);

// ||v1 + v2|| across an angle grid; strictly decreasing in angle.
struct GeometryRow {
  double angle;
  double norm;
};
std::vector<GeometryRow> lemma_geometry_sweep(double norm1, double norm2,
                                              const std::vector<double>& angle_grid);

// Per-row cosines binned uniformly over [-1, 1].
Histogram cosine_histogram(const DenseMatrix& a, const DenseMatrix& b,
                           std::size_t bins);

// Full diagnostic bundle used by the CLI `analyze` subcommand.
NoiseReport noise_report(const DenseMatrix& x, const std::vector<std::size_t>& labels,
                         std::size_t num_classes, const NormalizedAdjacency& adj,
                         std::size_t k_max, std::size_t histogram_bins = 20);

}  // namespace gcl
