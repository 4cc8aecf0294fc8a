#pragma once

#include <functional>
#include <stdexcept>
#include <string>

#include "acsim/field.hpp"
#include "acsim/sparse.hpp"

namespace acsim {

struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

// Preconditioned conjugate gradients on a caller-supplied operator apply.
// Stops when ||Ax - b||_2 <= tol * ||b||_2; throws SolverFailure otherwise.
// `apply(x, y)` computes y = A x; `precond[i]` approximates 1/diag(A).
Field solve_spd_apply(const std::function<void(const Field&, Field&)>& apply,
                      const Field& b, const Field& precond, double tol,
                      int max_iter);

// CG with diagonal (Jacobi) preconditioning on an assembled matrix.
Field solve_spd(const SparseOperator& A, const Field& b, double tol,
                int max_iter);

}  // namespace acsim
