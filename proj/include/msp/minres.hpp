#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "msp/dense_matrix.hpp"
#include "msp/errors.hpp"

namespace msp {

using LinOp = std::function<Vector(const Vector&)>;

struct MinresResult {
  Vector solution;
  std::size_t iterations = 0;
  std::vector<double> residual_history;  // preconditioned residual, relative to start
  bool converged = false;
};

inline std::size_t default_minres_maxit(std::size_t dim) {
  return std::min<std::size_t>(10 * dim, 50000);
}

// Preconditioned MINRES for symmetric A and SPD preconditioner M, x0 = 0.
// The residual estimate |eta| equals ||r_m||_{M^{-1}} in exact arithmetic;
// convergence is declared at |eta|/||b||_{M^{-1}} <= tol or |eta| <= 1e-14.
// Hitting maxit returns converged = false. A collapsed Krylov space with a
// nonzero residual throws Breakdown; an indefinite preconditioner throws Error.
inline MinresResult minres_solve(const LinOp& apply_a, const LinOp& apply_minv,
                                 const Vector& b, double tol = 1e-10,
                                 std::size_t maxit = 0) {
  if (!(tol > 0.0)) throw Error("minres_solve: tol must be positive");
  const std::size_t n = b.size();
  if (maxit == 0) maxit = default_minres_maxit(n);
  constexpr double abs_floor = 1e-14;

  MinresResult result;
  result.solution.assign(n, 0.0);

  Vector v_old(n, 0.0);
  Vector v = b;
  Vector z = apply_minv(v);
  if (z.size() != n) throw DimensionMismatch("minres_solve: preconditioner output size");
  double gamma2sq = dot(z, v);
  if (!(gamma2sq >= 0.0)) {
    if (gamma2sq < -1e-12 * (norm2(z) * norm2(v) + 1e-300))
      throw Error("minres_solve: preconditioner is not positive definite");
    gamma2sq = 0.0;
  }
  double gamma = std::sqrt(gamma2sq);
  if (gamma == 0.0) {
    // b = 0 (for SPD M): x = 0 is exact
    result.converged = true;
    result.residual_history = {0.0};
    return result;
  }
  const double beta1 = gamma;
  double gamma_old = 1.0;
  double eta = gamma;
  double c_old = 1.0, c_cur = 1.0, s_old = 0.0, s_cur = 0.0;
  Vector w_old(n, 0.0), w_cur(n, 0.0);
  result.residual_history = {1.0};

  for (std::size_t it = 1; it <= maxit; ++it) {
    scale(1.0 / gamma, z);
    Vector az = apply_a(z);
    if (az.size() != n) throw DimensionMismatch("minres_solve: operator output size");
    const double delta = dot(az, z);
    Vector v_next = az;
    axpy(-delta / gamma, v, v_next);
    axpy(-gamma / gamma_old, v_old, v_next);
    Vector z_next = apply_minv(v_next);
    double gn2 = dot(z_next, v_next);
    if (gn2 < 0.0) {
      if (gn2 < -1e-12 * (norm2(z_next) * norm2(v_next) + 1e-300))
        throw Error("minres_solve: preconditioner is not positive definite");
      gn2 = 0.0;
    }
    const double gamma_next = std::sqrt(gn2);

    const double alpha0 = c_cur * delta - c_old * s_cur * gamma;
    const double alpha1 = std::sqrt(alpha0 * alpha0 + gamma_next * gamma_next);
    const double alpha2 = s_cur * delta + c_old * c_cur * gamma;
    const double alpha3 = s_old * gamma;
    if (!(alpha1 > 0.0) || !std::isfinite(alpha1))
      throw Breakdown("minres_solve: zero pivot with nonzero residual");
    const double c_next = alpha0 / alpha1;
    const double s_next = gamma_next / alpha1;

    Vector w_next = z;
    axpy(-alpha3, w_old, w_next);
    axpy(-alpha2, w_cur, w_next);
    scale(1.0 / alpha1, w_next);
    axpy(c_next * eta, w_next, result.solution);
    eta = -s_next * eta;

    result.iterations = it;
    const double rel = std::abs(eta) / beta1;
    result.residual_history.push_back(rel);
    if (rel <= tol || std::abs(eta) <= abs_floor) {
      result.converged = true;
      break;
    }
    if (gamma_next == 0.0 || !std::isfinite(gamma_next))
      throw Breakdown("minres_solve: Krylov space collapsed before convergence");

    v_old = std::move(v);
    v = std::move(v_next);
    z = std::move(z_next);
    gamma_old = gamma;
    gamma = gamma_next;
    c_old = c_cur;
    c_cur = c_next;
    s_old = s_cur;
    s_cur = s_next;
    w_old = std::move(w_cur);
    w_cur = std::move(w_next);
  }
  return result;
}

}  // namespace msp
