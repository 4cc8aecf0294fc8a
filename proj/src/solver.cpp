#include "acsim/solver.hpp"

#include <cmath>

namespace acsim {

Field solve_spd_apply(const std::function<void(const Field&, Field&)>& apply,
                      const Field& b, const Field& precond, double tol,
                      int max_iter) {
  const std::size_t n = b.size();
  Field x(n, 0.0);
  Field r = b;  // r = b - A*0
  Field z(n), p(n), ap(n);

  double bnorm = 0.0;
  for (double v : b) bnorm += v * v;
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return x;
  const double target = tol * bnorm;

  for (std::size_t i = 0; i < n; ++i) z[i] = precond[i] * r[i];
  p = z;
  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];

  double rnorm = bnorm;
  for (int iter = 0; iter < max_iter; ++iter) {
    apply(p, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double alpha = rz / pap;
    rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
      rnorm += r[i] * r[i];
    }
    rnorm = std::sqrt(rnorm);
    if (rnorm <= target) return x;

    double rz_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = precond[i] * r[i];
      rz_next += r[i] * z[i];
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw SolverFailure("conjugate gradients did not converge", rnorm, max_iter);
}

Field solve_spd(const SparseOperator& A, const Field& b, double tol,
                int max_iter) {
  Field precond(A.dim, 1.0);
  for (int i = 0; i < A.dim; ++i) {
    const double d = A.diagonal(i);
    precond[i] = d > 0.0 ? 1.0 / d : 1.0;
  }
  return solve_spd_apply(
      [&A](const Field& x, Field& y) { A.multiply(x, y); }, b, precond, tol,
      max_iter);
}

}  // namespace acsim
