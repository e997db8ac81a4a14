#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>

#include "msp/banded_matrix.hpp"
#include "msp/chebyshev.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

// Inverse of c * (P M^{-1} P) for SPD banded P and M, applied as
// (1/c) * P^{-1} M P^{-1} with two direct banded solves of P.
class SandwichSchurOp {
 public:
  SandwichSchurOp(std::shared_ptr<const BandedMatrix> inner, BandedMatrix outer,
                  double c)
      : inner_(std::move(inner)), factor_(outer), inv_c_(1.0 / c) {
    if (!inner_) throw Error("SandwichSchurOp: null inner matrix");
    if (inner_->dim() != outer.dim())
      throw DimensionMismatch("SandwichSchurOp: size mismatch");
    if (!(c > 0.0)) throw NotPositiveDefinite("SandwichSchurOp: scale must be > 0");
  }

  std::size_t dim() const { return inner_->dim(); }

  Vector apply(const Vector& v) const {
    Vector t = factor_.solve(v);
    t = inner_->mul(t);
    t = factor_.solve(t);
    scale(inv_c_, t);
    return t;
  }

 private:
  std::shared_ptr<const BandedMatrix> inner_;
  BandedCholesky factor_;
  double inv_c_;
};

// Matching-strategy approximation of S = M + gamma K M^{-1} K:
//   hat-S = (1/sqrt2) (M + sqrt(gamma) K) M^{-1} (M + sqrt(gamma) K),
// whose relative spectrum lies in [1/sqrt2, sqrt2]. The returned operator
// applies hat-S^{-1}.
inline SandwichSchurOp matching_schur_op(std::shared_ptr<const BandedMatrix> mass,
                                         const BandedMatrix& stiffness,
                                         double gamma) {
  if (!mass) throw Error("matching_schur_op: null mass matrix");
  if (!(gamma > 0.0)) throw NotPositiveDefinite("matching_schur_op: gamma must be > 0");
  if (mass->dim() != stiffness.dim())
    throw DimensionMismatch("matching_schur_op: size mismatch");
  BandedMatrix outer(mass->dim(),
                     std::max(mass->half_bandwidth(), stiffness.half_bandwidth()));
  outer.add_scaled(1.0, *mass);
  outer.add_scaled(std::sqrt(gamma), stiffness);
  return SandwichSchurOp(std::move(mass), std::move(outer), 1.0 / std::sqrt(2.0));
}

// Dense realization of the matched target S = M + gamma K M^{-1} K, for
// eigenvalue studies at desk scale.
inline DenseMatrix dense_matched_target(const BandedMatrix& mass,
                                        const BandedMatrix& stiffness,
                                        double gamma) {
  const std::size_t n = mass.dim();
  const BandedCholesky mf(mass);
  DenseMatrix s = mass.to_dense();
  DenseMatrix kd = stiffness.to_dense();
  Vector col(n);
  DenseMatrix minv_k(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = kd(i, j);
    col = mf.solve(col);
    for (std::size_t i = 0; i < n; ++i) minv_k(i, j) = col[i];
  }
  DenseMatrix kmk = kd.matmul(minv_k);
  kmk.symmetrize();
  s.add_scaled(gamma, kmk);
  return s;
}

// Dense realization of the matching approximation hat-S itself.
inline DenseMatrix dense_matching_approx(const BandedMatrix& mass,
                                         const BandedMatrix& stiffness,
                                         double gamma) {
  const std::size_t n = mass.dim();
  BandedMatrix outer(n, std::max(mass.half_bandwidth(), stiffness.half_bandwidth()));
  outer.add_scaled(1.0, mass);
  outer.add_scaled(std::sqrt(gamma), stiffness);
  const DenseMatrix f = outer.to_dense();
  const BandedCholesky mf(mass);
  DenseMatrix minv_f(n, n);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = f(i, j);
    col = mf.solve(col);
    for (std::size_t i = 0; i < n; ++i) minv_f(i, j) = col[i];
  }
  DenseMatrix s = f.matmul(minv_f);
  s.symmetrize();
  s.scale_all(1.0 / std::sqrt(2.0));
  return s;
}

// hat-S3^{-1} v = M^{-1}[M + gamma K M^{-1} K]M^{-1} v with every M^{-1}
// replaced by the same Chebyshev approximation:
//   u1 = C v,  result = u1 + gamma * C(K(C(K u1))).
inline Vector s3hat_apply(const ChebyshevOp& mass_inv, const BandedMatrix& stiffness,
                          double gamma, const Vector& v) {
  if (mass_inv.dim() != stiffness.dim() || v.size() != mass_inv.dim())
    throw DimensionMismatch("s3hat_apply: size mismatch");
  Vector u1 = mass_inv.apply(v);
  Vector w = stiffness.mul(u1);
  w = mass_inv.apply(w);
  w = stiffness.mul(w);
  w = mass_inv.apply(w);
  axpy(gamma, w, u1);
  return u1;
}

}  // namespace msp
