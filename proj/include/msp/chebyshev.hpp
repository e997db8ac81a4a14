#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

#include "msp/banded_matrix.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

enum class ElementType { p1_triangle };

struct SpectralBounds {
  double lo = 0.0;
  double hi = 0.0;
};

// Eigenvalue bounds for diag(M)^{-1} M. For P1 triangles the bounds [1/2, 2]
// hold on any conforming triangulation (local element analysis).
inline SpectralBounds mass_spectral_bounds(ElementType type) {
  if (type != ElementType::p1_triangle)
    throw UnsupportedElement("mass_spectral_bounds: unknown element type");
  return {0.5, 2.0};
}

// Fixed-step Chebyshev semi-iteration on the Jacobi splitting of an SPD
// matrix, started from zero. apply(v) returns the m-step approximation to
// M^{-1} v; as an operator it is a fixed polynomial in D^{-1}M times D^{-1},
// hence linear, symmetric, and (for bounds that contain the spectrum) SPD.
class ChebyshevOp {
 public:
  ChebyshevOp(std::shared_ptr<const BandedMatrix> m, int steps, SpectralBounds bounds)
      : m_(std::move(m)), steps_(steps) {
    if (!m_) throw Error("ChebyshevOp: null matrix");
    if (steps_ < 1) throw Error("ChebyshevOp: need at least one step");
    if (!(bounds.lo > 0.0) || !(bounds.hi >= bounds.lo))
      throw NotPositiveDefinite("ChebyshevOp: bounds must satisfy 0 < lo <= hi");
    theta_ = 0.5 * (bounds.hi + bounds.lo);
    delta_ = 0.5 * (bounds.hi - bounds.lo);
    inv_diag_ = m_->diagonal();
    for (auto& d : inv_diag_) {
      if (!(d > 0.0))
        throw NotPositiveDefinite("ChebyshevOp: nonpositive diagonal entry");
      d = 1.0 / d;
    }
  }

  std::size_t dim() const { return m_->dim(); }
  int steps() const { return steps_; }

  Vector apply(const Vector& v) const {
    if (v.size() != dim()) throw DimensionMismatch("ChebyshevOp::apply: size mismatch");
    Vector z(v.size(), 0.0);
    Vector r = v;
    Vector d(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) d[i] = inv_diag_[i] * r[i] / theta_;
    if (delta_ == 0.0) {
      // degenerate bounds: damped Jacobi
      for (int step = 1; step <= steps_; ++step) {
        for (std::size_t i = 0; i < z.size(); ++i) z[i] += d[i];
        if (step == steps_) break;
        r = v;
        m_->mul_add(z, r, -1.0);
        for (std::size_t i = 0; i < v.size(); ++i) d[i] = inv_diag_[i] * r[i] / theta_;
      }
      return z;
    }
    double rho_prev = delta_ / theta_;
    for (int step = 1; step <= steps_; ++step) {
      for (std::size_t i = 0; i < z.size(); ++i) z[i] += d[i];
      if (step == steps_) break;
      m_->mul_add(d, r, -1.0);
      const double rho = 1.0 / (2.0 * theta_ / delta_ - rho_prev);
      const double a = rho * rho_prev;
      const double bcoef = 2.0 * rho / delta_;
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] = a * d[i] + bcoef * inv_diag_[i] * r[i];
      rho_prev = rho;
    }
    return z;
  }

 private:
  std::shared_ptr<const BandedMatrix> m_;
  int steps_;
  double theta_ = 0.0;
  double delta_ = 0.0;
  Vector inv_diag_;
};

inline Vector chebyshev_apply(const ChebyshevOp& op, const Vector& v) {
  return op.apply(v);
}

}  // namespace msp
