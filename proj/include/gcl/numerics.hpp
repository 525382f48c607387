#pragma once

#include <vector>

#include "gcl/matrix.hpp"

namespace gcl {

// Symmetric eigendecomposition result. Eigenvalues ascending, eigenvectors
// stored as orthonormal columns.
struct EigenDecomposition {
  std::vector<double> eigenvalues;
  DenseMatrix eigenvectors;
};

// Sparse-dense product s * m. Fixed per-row summation order (CSR order).
DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& m);

// Dense products.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b);  // a^T * b
DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b);  // a * b^T

// Elementwise max(0, x).
DenseMatrix relu(const DenseMatrix& m);
// 1 where x > 0 else 0 (subgradient at 0 is 0).
DenseMatrix relu_mask(const DenseMatrix& m);

// Per-row cosine similarity; rows with norm below 1e-12 yield 0.
std::vector<double> cosine_rows(const DenseMatrix& a, const DenseMatrix& b);

inline constexpr double kCosineNormGuard = 1e-12;

// Cyclic Jacobi eigensolver for symmetric matrices. Input must be symmetric
// within 1e-10 and no larger than max_dim.
EigenDecomposition sym_eig(const DenseMatrix& m, std::size_t max_dim = 4000);

inline constexpr std::size_t kEigDefaultCap = 4000;

}  // namespace gcl
