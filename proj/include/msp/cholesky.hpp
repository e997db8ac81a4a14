#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

// Lower-triangular Cholesky factor of a dense SPD matrix, M = L L^T.
class CholeskyFactor {
 public:
  explicit CholeskyFactor(DenseMatrix lower) : l_(std::move(lower)) {
    if (!l_.is_square()) throw DimensionMismatch("CholeskyFactor: not square");
  }

  std::size_t dim() const { return l_.rows(); }
  const DenseMatrix& lower() const { return l_; }

  // L y = v, in place.
  void forward(Vector& v) const {
    const std::size_t n = dim();
    if (v.size() != n) throw DimensionMismatch("forward: size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      const double* row = l_.row_data(i);
      double s = v[i];
      for (std::size_t j = 0; j < i; ++j) s -= row[j] * v[j];
      v[i] = s / row[i];
    }
  }

  // L^T x = v, in place.
  void backward(Vector& v) const {
    const std::size_t n = dim();
    if (v.size() != n) throw DimensionMismatch("backward: size mismatch");
    for (std::size_t i = n; i-- > 0;) {
      double s = v[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= l_(j, i) * v[j];
      v[i] = s / l_(i, i);
    }
  }

  Vector solve(const Vector& v) const {
    Vector x(v);
    forward(x);
    backward(x);
    return x;
  }

  // Column-wise solve, M X = B.
  DenseMatrix solve_matrix(const DenseMatrix& b) const {
    const std::size_t n = dim();
    if (b.rows() != n) throw DimensionMismatch("solve_matrix: size mismatch");
    DenseMatrix x(n, b.cols());
    Vector col(n);
    for (std::size_t j = 0; j < b.cols(); ++j) {
      for (std::size_t i = 0; i < n; ++i) col[i] = b(i, j);
      forward(col);
      backward(col);
      for (std::size_t i = 0; i < n; ++i) x(i, j) = col[i];
    }
    return x;
  }

 private:
  DenseMatrix l_;
};

namespace detail {

// Factorization without the symmetry gate, for callers that pass a shifted or
// implicitly symmetric matrix. Reads the lower triangle only.
inline DenseMatrix cholesky_lower(const DenseMatrix& m) {
  const std::size_t n = m.rows();
  DenseMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0) || !std::isfinite(d))
      throw NotPositiveDefinite("cholesky: nonpositive pivot at row " +
                                std::to_string(j));
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      const double* lrow = l.row_data(i);
      const double* jrow = l.row_data(j);
      for (std::size_t k = 0; k < j; ++k) s -= lrow[k] * jrow[k];
      l(i, j) = s / ljj;
    }
  }
  return l;
}

}  // namespace detail

inline CholeskyFactor cholesky(const DenseMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("cholesky: not square");
  if (!m.is_symmetric(1e-12))
    throw Error("cholesky: matrix is not symmetric");
  return CholeskyFactor(detail::cholesky_lower(m));
}

inline Vector solve_with_factor(const CholeskyFactor& f, const Vector& v) {
  return f.solve(v);
}

// PSD probe: Cholesky of A + eps*||A||*I succeeds. Zero matrices pass.
inline bool is_positive_semidefinite(const DenseMatrix& a, double rel_shift = 1e-12) {
  if (!a.is_square()) return false;
  const double scale = a.max_abs();
  if (scale == 0.0) return true;
  DenseMatrix shifted(a);
  for (std::size_t i = 0; i < a.rows(); ++i) shifted(i, i) += rel_shift * scale;
  try {
    detail::cholesky_lower(shifted);
  } catch (const NotPositiveDefinite&) {
    return false;
  }
  return true;
}

}  // namespace msp
