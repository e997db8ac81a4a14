#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

// Symmetric banded matrix, lower band stored row-wise: entry(i, d) = A(i, i-d)
// for 0 <= d <= half_bandwidth. Only the lower triangle is kept.
class BandedMatrix {
 public:
  BandedMatrix() = default;

  BandedMatrix(std::size_t n, std::size_t half_bandwidth)
      : n_(n), bw_(half_bandwidth), band_(n * (half_bandwidth + 1), 0.0) {}

  std::size_t dim() const { return n_; }
  std::size_t half_bandwidth() const { return bw_; }

  double& at(std::size_t i, std::size_t j) {
    const auto [r, c] = order(i, j);
    if (r - c > bw_) throw DimensionMismatch("BandedMatrix::at: outside band");
    return band_[r * (bw_ + 1) + (r - c)];
  }

  double get(std::size_t i, std::size_t j) const {
    const auto [r, c] = order(i, j);
    if (r - c > bw_) return 0.0;
    return band_[r * (bw_ + 1) + (r - c)];
  }

  void add_at(std::size_t i, std::size_t j, double v) { at(i, j) += v; }

  // y += scale * A x
  void mul_add(const Vector& x, Vector& y, double scale = 1.0) const {
    if (x.size() != n_ || y.size() != n_)
      throw DimensionMismatch("BandedMatrix::mul_add: size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      const double* row = band_.data() + i * (bw_ + 1);
      double s = row[0] * x[i];
      const std::size_t dmax = std::min(bw_, i);
      for (std::size_t d = 1; d <= dmax; ++d) {
        s += row[d] * x[i - d];
        y[i - d] += scale * row[d] * x[i];
      }
      y[i] += scale * s;
    }
  }

  Vector mul(const Vector& x) const {
    Vector y(n_, 0.0);
    mul_add(x, y);
    return y;
  }

  Vector diagonal() const {
    Vector d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = band_[i * (bw_ + 1)];
    return d;
  }

  // *this += a * other (bands must be compatible; other's band fits in ours)
  void add_scaled(double a, const BandedMatrix& other) {
    if (other.n_ != n_ || other.bw_ > bw_)
      throw DimensionMismatch("BandedMatrix::add_scaled: incompatible shapes");
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t dmax = std::min(other.bw_, i);
      for (std::size_t d = 0; d <= dmax; ++d)
        band_[i * (bw_ + 1) + d] += a * other.band_[i * (other.bw_ + 1) + d];
    }
  }

  void scale_all(double a) {
    for (auto& v : band_) v *= a;
  }

  DenseMatrix to_dense(double scale = 1.0) const {
    DenseMatrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t dmax = std::min(bw_, i);
      for (std::size_t d = 0; d <= dmax; ++d) {
        const double v = scale * band_[i * (bw_ + 1) + d];
        m(i, i - d) = v;
        m(i - d, i) = v;
      }
    }
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : band_) m = std::max(m, std::abs(v));
    return m;
  }

  double frobenius_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t dmax = std::min(bw_, i);
      for (std::size_t d = 0; d <= dmax; ++d) {
        const double v = band_[i * (bw_ + 1) + d];
        s += (d == 0 ? 1.0 : 2.0) * v * v;
      }
    }
    return std::sqrt(s);
  }

 private:
  static std::pair<std::size_t, std::size_t> order(std::size_t i, std::size_t j) {
    return i >= j ? std::pair{i, j} : std::pair{j, i};
  }

  std::size_t n_ = 0;
  std::size_t bw_ = 0;
  std::vector<double> band_;
};

// In-band Cholesky of a symmetric positive definite banded matrix. The factor
// keeps the same band (no fill-in below the band for banded SPD matrices).
class BandedCholesky {
 public:
  explicit BandedCholesky(const BandedMatrix& a, double diagonal_shift = 0.0)
      : n_(a.dim()), bw_(a.half_bandwidth()), l_(n_, bw_) {
    for (std::size_t j = 0; j < n_; ++j) {
      double d = a.get(j, j) + diagonal_shift;
      const std::size_t kmin = j > bw_ ? j - bw_ : 0;
      for (std::size_t k = kmin; k < j; ++k) {
        const double ljk = l_.get(j, k);
        d -= ljk * ljk;
      }
      if (!(d > 0.0) || !std::isfinite(d))
        throw NotPositiveDefinite("banded cholesky: nonpositive pivot at row " +
                                  std::to_string(j));
      const double ljj = std::sqrt(d);
      l_.at(j, j) = ljj;
      const std::size_t imax = std::min(n_ - 1, j + bw_);
      for (std::size_t i = j + 1; i <= imax; ++i) {
        double s = a.get(i, j);
        const std::size_t klo = std::max(kmin, i > bw_ ? i - bw_ : 0);
        for (std::size_t k = klo; k < j; ++k) s -= l_.get(i, k) * l_.get(j, k);
        l_.at(i, j) = s / ljj;
      }
    }
  }

  std::size_t dim() const { return n_; }

  void forward(Vector& v) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t kmin = i > bw_ ? i - bw_ : 0;
      double s = v[i];
      for (std::size_t k = kmin; k < i; ++k) s -= l_.get(i, k) * v[k];
      v[i] = s / l_.get(i, i);
    }
  }

  void backward(Vector& v) const {
    for (std::size_t i = n_; i-- > 0;) {
      const std::size_t jmax = std::min(n_ - 1, i + bw_);
      double s = v[i];
      for (std::size_t j = i + 1; j <= jmax; ++j) s -= l_.get(j, i) * v[j];
      v[i] = s / l_.get(i, i);
    }
  }

  Vector solve(const Vector& v) const {
    if (v.size() != n_) throw DimensionMismatch("BandedCholesky::solve: size mismatch");
    Vector x(v);
    forward(x);
    backward(x);
    return x;
  }

 private:
  std::size_t n_;
  std::size_t bw_;
  BandedMatrix l_;
};

inline BandedCholesky banded_cholesky(const BandedMatrix& a) {
  return BandedCholesky(a);
}

inline Vector banded_solve(const BandedCholesky& f, const Vector& v) {
  return f.solve(v);
}

// Restriction to an index subset, keep x keep, preserving bandedness.
inline BandedMatrix restrict_banded(const BandedMatrix& a,
                                    const std::vector<std::size_t>& keep) {
  if (keep.empty()) throw EmptyInactiveSet("restrict_banded: empty index set");
  BandedMatrix out(keep.size(), std::min(a.half_bandwidth(), keep.size() - 1));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t dmax = std::min(out.half_bandwidth(), r);
    for (std::size_t d = 0; d <= dmax; ++d) {
      const double v = a.get(keep[r], keep[r - d]);
      if (v != 0.0) out.at(r, r - d) = v;
    }
  }
  return out;
}

}  // namespace msp
