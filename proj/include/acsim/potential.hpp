#pragma once

#include "acsim/field.hpp"
#include "acsim/sparse.hpp"

namespace acsim {

// Singular logarithmic potential split into a convex entropy Psi with
// barriers at 0 and L, and the Lipschitz well perturbations used by the
// scheme:
//
//   Psi(s)  = theta * (s ln(s/L) + (L - s) ln((L - s)/L)),   s in (0, L)
//   well(s) = -theta0 * (s - 1/2)^2
//   f1(s)   = -f1_coeff * (s - 1/2)
//
// f1 is the implicit linear perturbation of the time stepper; the well term
// is what the free energy actually integrates.
struct PotentialSplit {
  double theta = 0.5;
  double theta0 = 1.0;
  double barrier = 1.0;   // L
  double f1_coeff = 4.0;  // defaults to 4*theta0

  void validate() const;  // throws std::invalid_argument

  double psi(double s) const;
  double psi_prime(double s) const;   // theta * ln(s / (L - s))
  double psi_second(double s) const;  // theta * L / (s (L - s))

  double f1(double s) const { return -f1_coeff * (s - 0.5); }

  double well(double s) const { return -theta0 * (s - 0.5) * (s - 0.5); }
  double well_prime(double s) const { return -2.0 * theta0 * (s - 0.5); }

  double phi(double s) const { return psi(s) + well(s); }
  double phi_prime(double s) const { return psi_prime(s) + well_prime(s); }
};

// Yosida regularization of Psi'. The resolvent R_lambda(s) is the unique
// r in (0, L) with r + lambda Psi'(r) = s; the regularized derivative is
// (s - R_lambda(s)) / lambda and is (1/lambda)-Lipschitz on all of R.
struct YosidaView {
  PotentialSplit base;
  double lambda = 1e-3;

  double resolvent(double s) const;
  double prime(double s) const;
  double value(double s) const;   // Psi(R(s)) + |s - R(s)|^2 / (2 lambda)
  double second(double s) const;  // d/ds prime(s), in (0, 1/lambda]
};

// Discrete free energy (eps/2) u^T K u + sum_i m_i Phi(u_i) with lumped
// quadrature of the potential. Entries must lie strictly inside (0, L).
double free_energy(const Field& u, const SparseOperator& stiffness,
                   const Field& lumped, const PotentialSplit& pot, double eps);

// Same functional with Phi_lambda in place of Phi; finite for any field, used
// to record the energy of Yosida-mode trajectories.
double free_energy_yosida(const Field& u, const SparseOperator& stiffness,
                          const Field& lumped, const YosidaView& view,
                          double eps);

}  // namespace acsim
