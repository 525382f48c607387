#include "gcl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gcl {

namespace {

void require_dims(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("dimension mismatch in ") + what);
}

}  // namespace

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& m) {
  require_dims(s.cols() == m.rows(), "spmm");
  DenseMatrix out(s.rows(), m.cols());
  const auto& rp = s.row_ptr();
  const auto& ci = s.col_idx();
  const auto& vals = s.values();
  const std::size_t nc = m.cols();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double* dst = out.row_ptr(i);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const double w = vals[k];
      const double* src = m.row_ptr(ci[k]);
      for (std::size_t j = 0; j < nc; ++j) dst[j] += w * src[j];
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  require_dims(a.cols() == b.rows(), "matmul");
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t nc = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    double* dst = out.row_ptr(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double av = ar[k];
      if (av == 0.0) continue;
      const double* br = b.row_ptr(k);
      for (std::size_t j = 0; j < nc; ++j) dst[j] += av * br[j];
    }
  }
  return out;
}

DenseMatrix matmul_at_b(const DenseMatrix& a, const DenseMatrix& b) {
  require_dims(a.rows() == b.rows(), "matmul_at_b");
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t nc = b.cols();
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const double* ar = a.row_ptr(r);
    const double* br = b.row_ptr(r);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double av = ar[i];
      if (av == 0.0) continue;
      double* dst = out.row_ptr(i);
      for (std::size_t j = 0; j < nc; ++j) dst[j] += av * br[j];
    }
  }
  return out;
}

DenseMatrix matmul_a_bt(const DenseMatrix& a, const DenseMatrix& b) {
  require_dims(a.cols() == b.cols(), "matmul_a_bt");
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* br = b.row_ptr(j);
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += ar[k] * br[k];
      out(i, j) = s;
    }
  }
  return out;
}

DenseMatrix relu(const DenseMatrix& m) {
  DenseMatrix out = m;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix relu_mask(const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    out.data()[i] = m.data()[i] > 0.0 ? 1.0 : 0.0;
  }
  return out;
}

std::vector<double> cosine_rows(const DenseMatrix& a, const DenseMatrix& b) {
  require_dims(a.same_shape(b), "cosine_rows");
  std::vector<double> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* ar = a.row_ptr(i);
    const double* br = b.row_ptr(i);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      dot += ar[j] * br[j];
      na += ar[j] * ar[j];
      nb += br[j] * br[j];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    out[i] = (na < kCosineNormGuard || nb < kCosineNormGuard) ? 0.0 : dot / (na * nb);
  }
  return out;
}

EigenDecomposition sym_eig(const DenseMatrix& m, std::size_t max_dim) {
  if (m.rows() != m.cols()) throw std::invalid_argument("sym_eig: not square");
  const std::size_t n = m.rows();
  if (n > max_dim) {
    throw std::invalid_argument("sym_eig: matrix size " + std::to_string(n) +
                                " exceeds cap " + std::to_string(max_dim));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::fabs(m(i, j) - m(j, i)) > 1e-10) {
        throw std::invalid_argument("sym_eig: input not symmetric within 1e-10");
      }
    }
  }

  DenseMatrix a = m;
  DenseMatrix v = DenseMatrix::identity(n);
  const double fnorm = m.frobenius_norm();
  const double tol = 1e-12 * (fnorm > 0.0 ? fnorm : 1.0);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  const int max_sweeps = 100;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = DenseMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.eigenvalues[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, j) = v(i, order[j]);
  }
  return out;
}

}  // namespace gcl
