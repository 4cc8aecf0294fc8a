#include "acsim/potential.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace acsim {

void PotentialSplit::validate() const {
  if (!(theta > 0.0)) throw std::invalid_argument("potential: theta must be > 0");
  if (!(theta0 > 0.0)) throw std::invalid_argument("potential: theta0 must be > 0");
  if (!(barrier > 0.0)) throw std::invalid_argument("potential: L must be > 0");
  if (!(theta < theta0))
    throw std::invalid_argument("potential: double-well regime requires theta < theta0");
}

double PotentialSplit::psi(double s) const {
  if (!(s > 0.0 && s < barrier))
    throw std::domain_error("psi: argument outside (0, L)");
  return theta * (s * std::log(s / barrier) +
                  (barrier - s) * std::log((barrier - s) / barrier));
}

double PotentialSplit::psi_prime(double s) const {
  if (!(s > 0.0 && s < barrier))
    throw std::domain_error("psi_prime: argument outside (0, L)");
  return theta * std::log(s / (barrier - s));
}

double PotentialSplit::psi_second(double s) const {
  if (!(s > 0.0 && s < barrier))
    throw std::domain_error("psi_second: argument outside (0, L)");
  return theta * barrier / (s * (barrier - s));
}

double YosidaView::resolvent(double s) const {
  const double L = base.barrier;
  // Psi' blows up at both endpoints, so r + lambda Psi'(r) - s always
  // brackets a root on (0, L); Newton with a bisection safeguard. The stop
  // is far below the 1e-12 (1+|s|) contract because (s - R)/lambda divides
  // any resolvent error by lambda.
  double lo = std::numeric_limits<double>::min();
  double hi = L - L * std::numeric_limits<double>::epsilon() / 2.0;
  double r = s;
  if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);

  const double tol = 1e-14 * (1.0 + std::abs(s));
  for (int iter = 0; iter < 200; ++iter) {
    const double g = r + lambda * base.psi_prime(r) - s;
    if (std::abs(g) <= tol) return r;
    if (g > 0.0)
      hi = r;
    else
      lo = r;
    if (hi - lo <= 4e-16 * std::max(1.0, hi)) break;  // lattice exhausted
    const double slope = 1.0 + lambda * base.psi_second(r);
    double trial = r - g / slope;
    if (!(trial > lo && trial < hi)) trial = 0.5 * (lo + hi);
    r = trial;
  }
  return r;
}

double YosidaView::prime(double s) const { return (s - resolvent(s)) / lambda; }

double YosidaView::value(double s) const {
  const double r = resolvent(s);
  const double d = s - r;
  return base.psi(r) + d * d / (2.0 * lambda);
}

double YosidaView::second(double s) const {
  const double c = base.psi_second(resolvent(s));
  return c / (1.0 + lambda * c);
}

double free_energy(const Field& u, const SparseOperator& stiffness,
                   const Field& lumped, const PotentialSplit& pot, double eps) {
  double bulk = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < pot.barrier))
      throw std::domain_error("free_energy: field entry outside (0, L)");
    bulk += lumped[i] * pot.phi(u[i]);
  }
  return 0.5 * eps * stiffness.quadratic_form(u) + bulk;
}

double free_energy_yosida(const Field& u, const SparseOperator& stiffness,
                          const Field& lumped, const YosidaView& view,
                          double eps) {
  double bulk = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    bulk += lumped[i] * (view.value(u[i]) + view.base.well(u[i]));
  return 0.5 * eps * stiffness.quadratic_form(u) + bulk;
}

}  // namespace acsim
