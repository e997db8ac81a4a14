#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "msp/errors.hpp"

namespace msp {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

// y += a * x
inline void axpy(double a, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw DimensionMismatch("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scale(double a, Vector& x) {
  for (auto& v : x) v *= a;
}

inline Vector scaled(double a, const Vector& x) {
  Vector y(x);
  scale(a, y);
  return y;
}

// Row-major dense matrix. Sized at construction; elements default to zero.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix from_rows(
      std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw DimensionMismatch("from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row_data(std::size_t i) const { return data_.data() + i * cols_; }
  double* row_data(std::size_t i) { return data_.data() + i * cols_; }

  Vector mul(const Vector& x) const {
    if (x.size() != cols_) throw DimensionMismatch("mul: size mismatch");
    Vector y(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = row_data(i);
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
      y[i] = s;
    }
    return y;
  }

  Vector mul_transpose(const Vector& x) const {
    if (x.size() != rows_) throw DimensionMismatch("mul_transpose: size mismatch");
    Vector y(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = row_data(i);
      const double xi = x[i];
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
    return y;
  }

  DenseMatrix matmul(const DenseMatrix& other) const {
    if (cols_ != other.rows_) throw DimensionMismatch("matmul: size mismatch");
    DenseMatrix out(rows_, other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t k = 0; k < cols_; ++k) {
        const double a = (*this)(i, k);
        if (a == 0.0) continue;
        const double* brow = other.row_data(k);
        double* orow = out.row_data(i);
        for (std::size_t j = 0; j < other.cols_; ++j) orow[j] += a * brow[j];
      }
    }
    return out;
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  // *this += a * other
  void add_scaled(double a, const DenseMatrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_)
      throw DimensionMismatch("add_scaled: size mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * other.data_[i];
  }

  void scale_all(double a) {
    for (auto& v : data_) v *= a;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  bool is_square() const { return rows_ == cols_; }

  // Max |a_ij - a_ji| <= rel_tol * max |a_ij|; zero matrices are symmetric.
  bool is_symmetric(double rel_tol = 1e-12) const {
    if (!is_square()) return false;
    const double scale = max_abs();
    if (scale == 0.0) return true;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale) return false;
    return true;
  }

  void symmetrize() {
    if (!is_square()) throw DimensionMismatch("symmetrize: not square");
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j) {
        const double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
        (*this)(i, j) = m;
        (*this)(j, i) = m;
      }
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a);
  out.add_scaled(-1.0, b);
  return out;
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a);
  out.add_scaled(1.0, b);
  return out;
}

}  // namespace msp
