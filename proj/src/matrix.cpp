#include "gcl/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gcl {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("DenseMatrix: data length " +
                                std::to_string(data_.size()) + " != " +
                                std::to_string(rows) + "x" + std::to_string(cols));
  }
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::check_finite(const char* context) const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::runtime_error(std::string("non-finite value in ") + context);
    }
  }
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         const std::vector<std::size_t>& r,
                                         const std::vector<std::size_t>& c,
                                         const std::vector<double>& v) {
  if (r.size() != c.size() || r.size() != v.size()) {
    throw std::invalid_argument("SparseMatrix: triplet arrays differ in length");
  }
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= rows || c[i] >= cols) {
      throw std::invalid_argument("SparseMatrix: triplet index out of range");
    }
    if (!std::isfinite(v[i])) {
      throw std::invalid_argument("SparseMatrix: non-finite value");
    }
  }
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return r[a] != r[b] ? r[a] < r[b] : c[a] < c[b];
  });

  SparseMatrix s;
  s.rows_ = rows;
  s.cols_ = cols;
  s.row_ptr_.assign(rows + 1, 0);
  s.col_idx_.reserve(r.size());
  s.values_.reserve(r.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    const std::size_t i = order[k];
    if (k > 0) {
      const std::size_t p = order[k - 1];
      if (r[p] == r[i] && c[p] == c[i]) {
        throw std::invalid_argument("SparseMatrix: duplicate entry at (" +
                                    std::to_string(r[i]) + "," +
                                    std::to_string(c[i]) + ")");
      }
    }
    s.row_ptr_[r[i] + 1]++;
    s.col_idx_.push_back(c[i]);
    s.values_.push_back(v[i]);
  }
  for (std::size_t i = 0; i < rows; ++i) s.row_ptr_[i + 1] += s.row_ptr_[i];
  return s;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return from_triplets(n, n, idx, idx, std::vector<double>(n, 1.0));
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      d(i, col_idx_[k]) = values_[k];
    }
  }
  return d;
}

}  // namespace gcl
