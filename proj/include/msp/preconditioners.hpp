#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "msp/block_system.hpp"
#include "msp/cholesky.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"
#include "msp/rng.hpp"

namespace msp {

// A square linear operator with a shared use counter. Counters make the
// "each inner solve is used exactly twice per outer application" property of
// the factorized preconditioner testable.
class BlockOperator {
 public:
  using Fn = std::function<Vector(const Vector&)>;

  BlockOperator() = default;

  BlockOperator(std::size_t dim, Fn fn)
      : state_(std::make_shared<State>(dim, std::move(fn))) {}

  std::size_t dim() const { return state_ ? state_->dim : 0; }

  Vector apply(const Vector& v) const {
    if (!state_) throw Error("BlockOperator: empty");
    if (v.size() != state_->dim)
      throw DimensionMismatch("BlockOperator::apply: size mismatch");
    state_->uses.fetch_add(1, std::memory_order_relaxed);
    return state_->fn(v);
  }

  std::size_t use_count() const {
    return state_ ? state_->uses.load(std::memory_order_relaxed) : 0;
  }

  void reset_count() const {
    if (state_) state_->uses.store(0, std::memory_order_relaxed);
  }

 private:
  struct State {
    State(std::size_t d, Fn f) : dim(d), fn(std::move(f)) {}
    std::size_t dim;
    Fn fn;
    mutable std::atomic<std::size_t> uses{0};
  };

  std::shared_ptr<State> state_;
};

// Approximate inverses hat-A_0^{-1}, hat-S_1^{-1}, ..., hat-S_k^{-1}. Each
// operator must be linear, symmetric, and positive definite for the induced
// preconditioners to be SPD.
struct BlockApproxSet {
  std::vector<BlockOperator> inv;

  std::size_t levels() const { return inv.size(); }

  std::size_t total_uses() const {
    std::size_t t = 0;
    for (const auto& op : inv) t += op.use_count();
    return t;
  }

  void reset_counts() const {
    for (const auto& op : inv) op.reset_count();
  }
};

inline BlockApproxSet ideal_blocks(const SchurChain& chain) {
  BlockApproxSet set;
  set.inv.reserve(chain.levels());
  for (std::size_t j = 0; j < chain.levels(); ++j) {
    auto f = std::make_shared<CholeskyFactor>(chain.factors[j]);
    set.inv.emplace_back(f->dim(), [f](const Vector& v) { return f->solve(v); });
  }
  return set;
}

// hat-S_j = c_j * S_j: the inverses get scaled by 1/c_j. Factors must be
// strictly positive for the preconditioner to stay SPD.
inline BlockApproxSet scaled_blocks(const SchurChain& chain,
                                    const std::vector<double>& factors) {
  if (factors.size() != chain.levels())
    throw DimensionMismatch("scaled_blocks: one factor per chain level required");
  for (double c : factors)
    if (!(c > 0.0)) throw NotPositiveDefinite("scaled_blocks: factors must be > 0");
  BlockApproxSet set;
  set.inv.reserve(chain.levels());
  for (std::size_t j = 0; j < chain.levels(); ++j) {
    auto f = std::make_shared<CholeskyFactor>(chain.factors[j]);
    const double inv_c = 1.0 / factors[j];
    set.inv.emplace_back(f->dim(), [f, inv_c](const Vector& v) {
      Vector x = f->solve(v);
      scale(inv_c, x);
      return x;
    });
  }
  return set;
}

namespace detail {

inline void check_set(const BlockApproxSet& set, const BlockSaddleSystem& sys) {
  if (set.levels() != sys.k() + 1)
    throw DimensionMismatch("approximation set does not match system block count");
  for (std::size_t j = 0; j <= sys.k(); ++j)
    if (set.inv[j].dim() != sys.block_size(j))
      throw DimensionMismatch("approximation block " + std::to_string(j) +
                              " has wrong dimension");
}

}  // namespace detail

// Block diagonal preconditioner: z_j = hat-S_j^{-1} v_j.
inline Vector apply_pd_inverse(const BlockApproxSet& set,
                               const BlockSaddleSystem& sys, const Vector& v) {
  detail::check_set(set, sys);
  if (v.size() != sys.dim())
    throw DimensionMismatch("apply_pd_inverse: size mismatch");
  Vector z(sys.dim());
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    Vector zj = set.inv[j].apply(sys.extract_block(v, j));
    sys.insert_block(zj, j, z);
  }
  return z;
}

// Forward substitution with P_L (lower block bidiagonal, diagonal (-1)^j S_j,
// subdiagonal B_j): y_j = (-1)^j hat-S_j^{-1} (v_j - B_j y_{j-1}).
inline Vector apply_pl_inverse(const BlockApproxSet& set,
                               const BlockSaddleSystem& sys, const Vector& v) {
  detail::check_set(set, sys);
  if (v.size() != sys.dim())
    throw DimensionMismatch("apply_pl_inverse: size mismatch");
  Vector y(sys.dim());
  Vector prev;
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    Vector rhs = sys.extract_block(v, j);
    if (j >= 1) sys.b(j).mul_add(prev, rhs, -1.0);
    Vector yj = set.inv[j].apply(rhs);
    if (j % 2 == 1) scale(-1.0, yj);
    sys.insert_block(yj, j, y);
    prev = std::move(yj);
  }
  return y;
}

// Factorized preconditioner P_k = P_L P_D^{-1} P_U applied by one forward and
// one backward block substitution. Uses hat-S_j^{-1} twice for j < k and once
// for j = k.
inline Vector apply_pk_inverse(const BlockApproxSet& set,
                               const BlockSaddleSystem& sys, const Vector& v) {
  detail::check_set(set, sys);
  if (v.size() != sys.dim())
    throw DimensionMismatch("apply_pk_inverse: size mismatch");
  const std::size_t k = sys.k();
  // forward sweep: w = P_L^{-1} v
  std::vector<Vector> w(k + 1);
  for (std::size_t j = 0; j <= k; ++j) {
    Vector rhs = sys.extract_block(v, j);
    if (j >= 1) sys.b(j).mul_add(w[j - 1], rhs, -1.0);
    w[j] = set.inv[j].apply(rhs);
    if (j % 2 == 1) scale(-1.0, w[j]);
  }
  // backward sweep: z_k = (-1)^k w_k, z_j = (-1)^j (w_j - hat-S_j^{-1} B_{j+1}^T z_{j+1})
  Vector z(sys.dim());
  Vector znext = w[k];
  if (k % 2 == 1) scale(-1.0, znext);
  sys.insert_block(znext, k, z);
  for (std::size_t j = k; j-- > 0;) {
    Vector t(sys.block_size(j), 0.0);
    sys.b(j + 1).mul_transpose_add(znext, t, 1.0);
    Vector corr = set.inv[j].apply(t);
    Vector zj = w[j];
    axpy(-1.0, corr, zj);
    if (j % 2 == 1) scale(-1.0, zj);
    sys.insert_block(zj, j, z);
    znext = std::move(zj);
  }
  return z;
}

// Dense realizations for eigenvalue studies (desk scale only).

inline DenseMatrix dense_pd(const BlockSaddleSystem& sys, const SchurChain& chain,
                            const std::vector<double>& factors = {}) {
  if (!factors.empty() && factors.size() != chain.levels())
    throw DimensionMismatch("dense_pd: one factor per level required");
  DenseMatrix p(sys.dim(), sys.dim());
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const double c = factors.empty() ? 1.0 : factors[j];
    const std::size_t oj = sys.offset(j);
    const DenseMatrix& s = chain.s[j];
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t cidx = 0; cidx < s.cols(); ++cidx)
        p(oj + r, oj + cidx) = c * s(r, cidx);
  }
  return p;
}

// P_k = P_L P_D^{-1} P_U with hat-S_j = c_j S_j throughout.
inline DenseMatrix dense_pk(const BlockSaddleSystem& sys, const SchurChain& chain,
                            const std::vector<double>& factors = {}) {
  if (!factors.empty() && factors.size() != chain.levels())
    throw DimensionMismatch("dense_pk: one factor per level required");
  const std::size_t n = sys.dim();
  DenseMatrix pl(n, n);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const double c = factors.empty() ? 1.0 : factors[j];
    const std::size_t oj = sys.offset(j);
    const double sj = BlockSaddleSystem::sign_of(j);
    const DenseMatrix& s = chain.s[j];
    for (std::size_t r = 0; r < s.rows(); ++r)
      for (std::size_t cidx = 0; cidx < s.cols(); ++cidx)
        pl(oj + r, oj + cidx) = sj * c * s(r, cidx);
    if (j >= 1) {
      const std::size_t op = sys.offset(j - 1);
      const DenseMatrix bj = sys.b(j).to_dense();
      for (std::size_t r = 0; r < bj.rows(); ++r)
        for (std::size_t cidx = 0; cidx < bj.cols(); ++cidx)
          pl(oj + r, op + cidx) = bj(r, cidx);
    }
  }
  const DenseMatrix pu = pl.transpose();
  // Z = diag(c_j S_j)^{-1} P_U
  DenseMatrix z(n, n);
  for (std::size_t j = 0; j <= sys.k(); ++j) {
    const double c = factors.empty() ? 1.0 : factors[j];
    const std::size_t oj = sys.offset(j);
    const std::size_t nj = sys.block_size(j);
    Vector col(nj);
    for (std::size_t cidx = 0; cidx < n; ++cidx) {
      for (std::size_t i = 0; i < nj; ++i) col[i] = pu(oj + i, cidx);
      col = chain.factors[j].solve(col);
      for (std::size_t i = 0; i < nj; ++i) z(oj + i, cidx) = col[i] / c;
    }
  }
  DenseMatrix p = pl.matmul(z);
  p.symmetrize();
  return p;
}

// Structural certificate that P_L^{-1} A_k is unit upper block triangular:
// returns the largest strict-lower block norm and the largest deviation of a
// diagonal block from the identity (both Frobenius).
struct TriangularDeviation {
  double lower = 0.0;
  double diagonal = 0.0;
};

inline TriangularDeviation pl_similarity_deviation(const BlockSaddleSystem& sys,
                                                   const SchurChain& chain) {
  const std::size_t n = sys.dim();
  const DenseMatrix full = assemble_full(sys);
  const BlockApproxSet exact = ideal_blocks(chain);
  DenseMatrix x(n, n);
  Vector col(n);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t i = 0; i < n; ++i) col[i] = full(i, c);
    Vector y = apply_pl_inverse(exact, sys, col);
    for (std::size_t i = 0; i < n; ++i) x(i, c) = y[i];
  }
  TriangularDeviation dev;
  for (std::size_t br = 0; br <= sys.k(); ++br) {
    for (std::size_t bc = 0; bc <= sys.k(); ++bc) {
      if (bc > br) continue;  // blocks above the diagonal are unconstrained
      double s = 0.0;
      for (std::size_t r = 0; r < sys.block_size(br); ++r)
        for (std::size_t c = 0; c < sys.block_size(bc); ++c) {
          double v = x(sys.offset(br) + r, sys.offset(bc) + c);
          if (br == bc && r == c) v -= 1.0;
          s += v * v;
        }
      const double norm = std::sqrt(s);
      if (br == bc)
        dev.diagonal = std::max(dev.diagonal, norm);
      else if (bc < br)
        dev.lower = std::max(dev.lower, norm);
    }
  }
  return dev;
}

// Statistical SPD probe: symmetry of <Op u, v> and positivity of <Op u, u>
// on random vectors. Not a proof, but catches sign errors and asymmetric
// approximations reliably.
inline bool spd_probe(const BlockOperator& op, Rng& rng, int probes = 100,
                      double rel_tol = 1e-8) {
  const std::size_t n = op.dim();
  for (int p = 0; p < probes; ++p) {
    Vector u(n), v(n);
    for (auto& x : u) x = rng.uniform(-1.0, 1.0);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    const Vector au = op.apply(u);
    const Vector av = op.apply(v);
    const double s1 = dot(au, v);
    const double s2 = dot(u, av);
    const double scale = norm2(au) * norm2(v) + norm2(u) * norm2(av);
    if (std::abs(s1 - s2) > rel_tol * std::max(scale, 1e-300)) return false;
    if (!(dot(au, u) > 0.0)) return false;
  }
  return true;
}

inline bool spd_probe_all(const BlockApproxSet& set, std::uint64_t seed,
                          int probes = 100, double rel_tol = 1e-8) {
  for (std::size_t j = 0; j < set.levels(); ++j) {
    Rng rng = Rng::substream(seed, j);
    if (!spd_probe(set.inv[j], rng, probes, rel_tol)) return false;
  }
  return true;
}

}  // namespace msp
