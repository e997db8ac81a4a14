#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "msp/banded_matrix.hpp"
#include "msp/cholesky.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

// One block of a block matrix. Zero blocks carry only their shape; banded
// blocks are symmetric and may be shared between systems (e.g. one assembled
// mass matrix appearing in several places) with an optional scalar factor.
class Block {
 public:
  static Block zero(std::size_t rows, std::size_t cols) {
    Block b;
    b.rows_ = rows;
    b.cols_ = cols;
    return b;
  }

  static Block dense(DenseMatrix m) {
    Block b;
    b.rows_ = m.rows();
    b.cols_ = m.cols();
    b.dense_ = std::make_shared<const DenseMatrix>(std::move(m));
    return b;
  }

  static Block banded(std::shared_ptr<const BandedMatrix> m, double scale = 1.0) {
    if (!m) throw Error("Block::banded: null matrix");
    Block b;
    b.rows_ = m->dim();
    b.cols_ = m->dim();
    b.banded_ = std::move(m);
    b.scale_ = scale;
    return b;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_zero() const { return !dense_ && !banded_; }
  bool is_banded() const { return banded_ != nullptr; }
  std::shared_ptr<const BandedMatrix> banded_matrix() const { return banded_; }
  double banded_factor() const { return scale_; }

  // y += sign * B x
  void mul_add(const Vector& x, Vector& y, double sign = 1.0) const {
    if (x.size() != cols_ || y.size() != rows_)
      throw DimensionMismatch("Block::mul_add: size mismatch");
    if (is_zero()) return;
    if (banded_) {
      banded_->mul_add(x, y, sign * scale_);
      return;
    }
    const DenseMatrix& d = *dense_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = d.row_data(i);
      double s = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) s += row[j] * x[j];
      y[i] += sign * s;
    }
  }

  // y += sign * B^T x
  void mul_transpose_add(const Vector& x, Vector& y, double sign = 1.0) const {
    if (x.size() != rows_ || y.size() != cols_)
      throw DimensionMismatch("Block::mul_transpose_add: size mismatch");
    if (is_zero()) return;
    if (banded_) {
      banded_->mul_add(x, y, sign * scale_);  // symmetric
      return;
    }
    const DenseMatrix& d = *dense_;
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* row = d.row_data(i);
      const double xi = sign * x[i];
      for (std::size_t j = 0; j < cols_; ++j) y[j] += row[j] * xi;
    }
  }

  DenseMatrix to_dense() const {
    if (is_zero()) return DenseMatrix(rows_, cols_);
    if (banded_) return banded_->to_dense(scale_);
    return *dense_;
  }

  double max_abs() const {
    if (is_zero()) return 0.0;
    if (banded_) return std::abs(scale_) * banded_->max_abs();
    return dense_->max_abs();
  }

  // Symmetric positive semidefinite probe via shifted Cholesky.
  bool is_positive_semidefinite(double rel_shift = 1e-12) const {
    if (rows_ != cols_) return false;
    if (is_zero()) return true;
    const double scale = max_abs();
    if (scale == 0.0) return true;
    if (banded_) {
      BandedMatrix copy(*banded_);
      copy.scale_all(scale_);
      try {
        BandedCholesky f(copy, rel_shift * scale);
        (void)f;
      } catch (const NotPositiveDefinite&) {
        return false;
      }
      return true;
    }
    if (!dense_->is_symmetric(1e-12)) return false;
    return msp::is_positive_semidefinite(*dense_, rel_shift);
  }

  // Strict SPD check by exact (unshifted) factorization.
  bool is_positive_definite() const {
    if (rows_ != cols_ || is_zero()) return false;
    if (banded_) {
      BandedMatrix copy(*banded_);
      copy.scale_all(scale_);
      try {
        BandedCholesky f(copy);
        (void)f;
      } catch (const NotPositiveDefinite&) {
        return false;
      }
      return true;
    }
    if (!dense_->is_symmetric(1e-12)) return false;
    try {
      (void)detail::cholesky_lower(*dense_);
    } catch (const NotPositiveDefinite&) {
      return false;
    }
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const DenseMatrix> dense_;
  std::shared_ptr<const BandedMatrix> banded_;
  double scale_ = 1.0;
};

// Block tridiagonal multiple saddle-point matrix
//   diag((-1)^j A_j) + subdiagonal B_j + superdiagonal B_j^T,
// with A_0 SPD and A_1..A_k symmetric PSD. Block row j has size n_j.
class BlockSaddleSystem {
 public:
  BlockSaddleSystem(std::vector<Block> diag, std::vector<Block> sub)
      : a_(std::move(diag)), b_(std::move(sub)) {
    if (a_.empty() || a_.size() != b_.size() + 1)
      throw DimensionMismatch(
          "BlockSaddleSystem: need k+1 diagonal and k coupling blocks");
    sizes_.resize(a_.size());
    offsets_.resize(a_.size() + 1, 0);
    for (std::size_t j = 0; j < a_.size(); ++j) {
      if (a_[j].rows() != a_[j].cols())
        throw DimensionMismatch("BlockSaddleSystem: A_" + std::to_string(j) +
                                " is not square");
      sizes_[j] = a_[j].rows();
      if (sizes_[j] == 0)
        throw DimensionMismatch("BlockSaddleSystem: empty block " + std::to_string(j));
      offsets_[j + 1] = offsets_[j] + sizes_[j];
    }
    for (std::size_t j = 1; j <= b_.size(); ++j) {
      const Block& bj = b_[j - 1];
      if (bj.rows() != sizes_[j] || bj.cols() != sizes_[j - 1])
        throw DimensionMismatch("BlockSaddleSystem: B_" + std::to_string(j) +
                                " has wrong shape");
    }
    if (!a_[0].is_positive_definite())
      throw NotPositiveDefinite("BlockSaddleSystem: A_0 must be SPD");
    for (std::size_t j = 1; j < a_.size(); ++j)
      if (!a_[j].is_positive_semidefinite())
        throw NotPositiveDefinite("BlockSaddleSystem: A_" + std::to_string(j) +
                                  " is not positive semidefinite");
  }

  std::size_t k() const { return b_.size(); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t block_size(std::size_t j) const { return sizes_[j]; }
  std::size_t offset(std::size_t j) const { return offsets_[j]; }
  std::size_t dim() const { return offsets_.back(); }

  const Block& a(std::size_t j) const { return a_[j]; }

  // B_j, 1-based to match the block structure.
  const Block& b(std::size_t j) const {
    if (j < 1 || j > b_.size())
      throw DimensionMismatch("BlockSaddleSystem::b: bad index");
    return b_[j - 1];
  }

  static double sign_of(std::size_t j) { return j % 2 == 0 ? 1.0 : -1.0; }

  // y = A_k x
  Vector apply(const Vector& x) const {
    if (x.size() != dim())
      throw DimensionMismatch("BlockSaddleSystem::apply: size mismatch");
    Vector y(dim(), 0.0);
    Vector xj, yj;
    for (std::size_t j = 0; j <= k(); ++j) {
      yj.assign(sizes_[j], 0.0);
      xj.assign(x.begin() + offsets_[j], x.begin() + offsets_[j + 1]);
      a_[j].mul_add(xj, yj, sign_of(j));
      if (j >= 1) {
        Vector xprev(x.begin() + offsets_[j - 1], x.begin() + offsets_[j]);
        b(j).mul_add(xprev, yj, 1.0);
      }
      if (j < k()) {
        Vector xnext(x.begin() + offsets_[j + 1], x.begin() + offsets_[j + 2]);
        b(j + 1).mul_transpose_add(xnext, yj, 1.0);
      }
      for (std::size_t i = 0; i < sizes_[j]; ++i) y[offsets_[j] + i] = yj[i];
    }
    return y;
  }

  Vector extract_block(const Vector& x, std::size_t j) const {
    return Vector(x.begin() + offsets_[j], x.begin() + offsets_[j + 1]);
  }

  void insert_block(const Vector& xj, std::size_t j, Vector& x) const {
    for (std::size_t i = 0; i < sizes_[j]; ++i) x[offsets_[j] + i] = xj[i];
  }

 private:
  std::vector<Block> a_;
  std::vector<Block> b_;
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
};

inline DenseMatrix assemble_full(const BlockSaddleSystem& sys) {
  const std::size_t n = sys.dim();
  DenseMatrix m(n, n);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const std::size_t oj = sys.offset(j);
    const DenseMatrix aj = sys.a(j).to_dense();
    const double sj = BlockSaddleSystem::sign_of(j);
    for (std::size_t r = 0; r < aj.rows(); ++r)
      for (std::size_t c = 0; c < aj.cols(); ++c) m(oj + r, oj + c) = sj * aj(r, c);
    if (j >= 1) {
      const std::size_t op = sys.offset(j - 1);
      const DenseMatrix bj = sys.b(j).to_dense();
      for (std::size_t r = 0; r < bj.rows(); ++r)
        for (std::size_t c = 0; c < bj.cols(); ++c) {
          m(oj + r, op + c) = bj(r, c);
          m(op + c, oj + r) = bj(r, c);
        }
    }
  }
  return m;
}

// (sum of even-index block sizes, sum of odd-index block sizes): the inertia
// of the ideal preconditioned operator.
inline std::pair<std::size_t, std::size_t> signature_counts(
    const BlockSaddleSystem& sys) {
  std::size_t even = 0, odd = 0;
  for (std::size_t j = 0; j < sys.sizes().size(); ++j)
    (j % 2 == 0 ? even : odd) += sys.sizes()[j];
  return {even, odd};
}

// Dense Schur complement chain S_0 = A_0, S_j = A_j + B_j S_{j-1}^{-1} B_j^T,
// each factored. Throws SchurNotSpd with the failing level.
struct SchurChain {
  std::vector<DenseMatrix> s;
  std::vector<CholeskyFactor> factors;

  std::size_t levels() const { return s.size(); }
};

inline SchurChain schur_chain(const BlockSaddleSystem& sys) {
  SchurChain chain;
  chain.s.reserve(sys.k() + 1);
  chain.factors.reserve(sys.k() + 1);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    DenseMatrix sj = sys.a(j).to_dense();
    sj.symmetrize();
    if (j >= 1) {
      const DenseMatrix bj = sys.b(j).to_dense();
      // S_{j-1}^{-1} B_j^T, column by column
      const CholeskyFactor& prev = chain.factors[j - 1];
      DenseMatrix t(bj.cols(), bj.rows());
      Vector col(bj.cols());
      for (std::size_t c = 0; c < bj.rows(); ++c) {
        for (std::size_t i = 0; i < bj.cols(); ++i) col[i] = bj(c, i);
        col = prev.solve(col);
        for (std::size_t i = 0; i < bj.cols(); ++i) t(i, c) = col[i];
      }
      DenseMatrix add = bj.matmul(t);
      add.symmetrize();
      sj.add_scaled(1.0, add);
      sj.symmetrize();
    }
    try {
      chain.factors.emplace_back(detail::cholesky_lower(sj));
    } catch (const NotPositiveDefinite&) {
      throw SchurNotSpd(j);
    }
    chain.s.push_back(std::move(sj));
  }
  return chain;
}

// Relative Frobenius error of the identity A_k = P_L diag((-1)^j S_j)^{-1} P_U,
// where P_L is lower block bidiagonal with diagonal (-1)^j S_j and subdiagonal
// B_j, and P_U = P_L^T.
inline double reconstruct_from_factorization(const BlockSaddleSystem& sys,
                                             const SchurChain& chain) {
  if (chain.levels() != sys.k() + 1)
    throw DimensionMismatch("reconstruct_from_factorization: chain level mismatch");
  const std::size_t n = sys.dim();
  DenseMatrix pl(n, n);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const std::size_t oj = sys.offset(j);
    const double sj = BlockSaddleSystem::sign_of(j);
    const DenseMatrix& s = chain.s[j];
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t c = 0; c < s.cols(); ++c) pl(oj + r, oj + c) = sj * s(r, c);
    if (j >= 1) {
      const std::size_t op = sys.offset(j - 1);
      const DenseMatrix bj = sys.b(j).to_dense();
      for (std::size_t r = 0; r < bj.rows(); ++r)
        for (std::size_t c = 0; c < bj.cols(); ++c) pl(oj + r, op + c) = bj(r, c);
    }
  }
  const DenseMatrix pu = pl.transpose();
  // Z = diag((-1)^j S_j)^{-1} P_U, solved block row by block row.
  DenseMatrix z(n, n);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const std::size_t oj = sys.offset(j);
    const std::size_t nj = sys.block_size(j);
    const double sj = BlockSaddleSystem::sign_of(j);
    Vector col(nj);
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t i = 0; i < nj; ++i) col[i] = pu(oj + i, c);
      col = chain.factors[j].solve(col);
      for (std::size_t i = 0; i < nj; ++i) z(oj + i, c) = sj * col[i];
    }
  }
  const DenseMatrix recon = pl.matmul(z);
  const DenseMatrix full = assemble_full(sys);
  const DenseMatrix diff = recon - full;
  const double denom = full.frobenius_norm();
  return denom == 0.0 ? diff.frobenius_norm() : diff.frobenius_norm() / denom;
}

}  // namespace msp
