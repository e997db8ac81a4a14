#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "msp/cholesky.hpp"
#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

struct Spectrum {
  std::vector<double> values;  // ascending

  double min() const { return values.front(); }
  double max() const { return values.back(); }
  std::size_t size() const { return values.size(); }
};

namespace detail {

// Householder reduction of a symmetric matrix (full storage, both triangles)
// to tridiagonal form. d = diagonal, e = off-diagonal with e[i] = T(i, i+1).
inline void householder_tridiagonalize(DenseMatrix a, std::vector<double>& d,
                                       std::vector<double>& e) {
  const std::size_t n = a.rows();
  d.assign(n, 0.0);
  e.assign(n, 0.0);
  std::vector<double> v, p, w;
  for (std::size_t j = 0; j + 2 < n; ++j) {
    const std::size_t m = n - 1 - j;
    double sigma2 = 0.0;
    for (std::size_t i = j + 1; i < n; ++i) sigma2 += a(i, j) * a(i, j);
    const double sigma = std::sqrt(sigma2);
    if (sigma == 0.0) continue;
    const double x0 = a(j + 1, j);
    const double alpha = x0 >= 0.0 ? -sigma : sigma;
    v.assign(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) v[i] = a(j + 1 + i, j);
    v[0] -= alpha;
    double vtv = 0.0;
    for (double t : v) vtv += t * t;
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;
    p.assign(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      const double* row = a.row_data(j + 1 + r) + (j + 1);
      double s = 0.0;
      for (std::size_t c = 0; c < m; ++c) s += row[c] * v[c];
      p[r] = beta * s;
    }
    double pv = 0.0;
    for (std::size_t i = 0; i < m; ++i) pv += p[i] * v[i];
    w.assign(m, 0.0);
    const double half = 0.5 * beta * pv;
    for (std::size_t i = 0; i < m; ++i) w[i] = p[i] - half * v[i];
    for (std::size_t r = 0; r < m; ++r) {
      double* row = a.row_data(j + 1 + r) + (j + 1);
      for (std::size_t c = 0; c < m; ++c)
        row[c] -= v[r] * w[c] + w[r] * v[c];
    }
    a(j + 1, j) = alpha;
    a(j, j + 1) = alpha;
    for (std::size_t i = j + 2; i < n; ++i) {
      a(i, j) = 0.0;
      a(j, i) = 0.0;
    }
  }
  for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) e[i] = a(i + 1, i);
}

// Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
// e[i] = T(i, i+1); e[n-1] must be zero. 30 sweeps per eigenvalue.
inline void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 30)
          throw NoConvergence("tridiagonal QL: more than 30 sweeps");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        bool underflow = false;
        for (std::size_t i = m; i-- > l;) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
}

inline Spectrum sym_eigs_prepared(DenseMatrix a) {
  std::vector<double> d, e;
  householder_tridiagonalize(std::move(a), d, e);
  tridiagonal_eigenvalues(d, e);
  return Spectrum{std::move(d)};
}

}  // namespace detail

inline Spectrum sym_eigs(const DenseMatrix& m) {
  if (!m.is_square()) throw DimensionMismatch("sym_eigs: not square");
  if (!m.is_symmetric(1e-12)) throw Error("sym_eigs: matrix is not symmetric");
  DenseMatrix a(m);
  a.symmetrize();
  return detail::sym_eigs_prepared(std::move(a));
}

// Eigenvalues of P^{-1} A for symmetric A and SPD P, via the congruent
// symmetric problem L^{-1} A L^{-T} with P = L L^T.
inline Spectrum gen_eigs(const DenseMatrix& a, const DenseMatrix& p) {
  if (!a.is_square() || !p.is_square() || a.rows() != p.rows())
    throw DimensionMismatch("gen_eigs: size mismatch");
  if (!a.is_symmetric(1e-12)) throw Error("gen_eigs: A is not symmetric");
  const CholeskyFactor f = cholesky(p);
  const std::size_t n = a.rows();
  DenseMatrix w(n, n);
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = a(i, j);
    f.forward(col);
    for (std::size_t i = 0; i < n; ++i) w(i, j) = col[i];
  }
  DenseMatrix c(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < n; ++i) col[i] = w(r, i);
    f.forward(col);
    for (std::size_t i = 0; i < n; ++i) c(r, i) = col[i];
  }
  c.symmetrize();
  return detail::sym_eigs_prepared(std::move(c));
}

}  // namespace msp
