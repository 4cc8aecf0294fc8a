#include <doctest.h>

#include <cmath>

#include "acsim/mesh.hpp"
#include "acsim/potential.hpp"
#include "acsim/rng.hpp"

using namespace acsim;

namespace {

// Oracle: bisection on r + lambda psi'(r) = s over (0, 1), independent of the
// safeguarded-Newton implementation.
double resolvent_bisect(const PotentialSplit& pot, double lambda, double s) {
  double lo = 1e-300, hi = 1.0 - 1e-16;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid + lambda * pot.psi_prime(mid) - s > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed-form values of the Flory-Huggins split") {
  PotentialSplit pot;  // theta=1/2, theta0=1, L=1, f1_coeff=4
  CHECK(pot.psi(0.5) == doctest::Approx(-0.34657359027997264).epsilon(1e-14));
  CHECK(pot.psi_prime(0.5) == 0.0);
  CHECK(pot.psi_second(0.5) == doctest::Approx(2.0).epsilon(1e-14));

  CHECK(pot.f1(0.5) == 0.0);
  CHECK(pot.f1(1.0) == doctest::Approx(-2.0).epsilon(1e-14));

  CHECK_THROWS_AS(pot.psi(0.0), std::domain_error);
  CHECK_THROWS_AS(pot.psi(1.0), std::domain_error);
  CHECK_THROWS_AS(pot.psi_prime(-0.1), std::domain_error);

  PotentialSplit bad = pot;
  bad.theta = 2.0;  // theta >= theta0 breaks the double well
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("rescaled entropy for general barrier L") {
  PotentialSplit pot;
  pot.theta = 0.5;
  pot.barrier = 2.0;
  CHECK(pot.psi_prime(1.0) == 0.0);  // midpoint of (0, L)
  // identity psi''(s) s (L - s) = theta L
  RngStream rng(5, 0, 0, StreamPurpose::init_field);
  for (int k = 0; k < 1000; ++k) {
    const double s = 2.0 * rng.uniform();
    if (s <= 0.0 || s >= 2.0) continue;
    CHECK(std::abs(pot.psi_second(s) * s * (2.0 - s) - pot.theta * 2.0) <=
          1e-12);
  }
}

TEST_CASE("resolvent: fixed point, oracle root, non-expansiveness") {
  PotentialSplit pot;
  const YosidaView view{pot, 0.1};

  CHECK(view.resolvent(0.5) == doctest::Approx(0.5).epsilon(1e-13));

  // root of r + 0.05 ln(r/(1-r)) = 0.9, frozen from the bisection oracle
  const double root = view.resolvent(0.9);
  CHECK(root == doctest::Approx(0.82311886627069442).epsilon(1e-11));
  CHECK(std::abs(root - resolvent_bisect(pot, 0.1, 0.9)) <= 1e-11);
  CHECK(std::abs(root + 0.1 * pot.psi_prime(root) - 0.9) <=
        1e-12 * (1.0 + 0.9));

  RngStream rng(6, 0, 0, StreamPurpose::init_field);
  for (int k = 0; k < 10000; ++k) {
    const double a = -2.0 + 5.0 * rng.uniform();
    const double b = -2.0 + 5.0 * rng.uniform();
    CHECK(std::abs(view.resolvent(a) - view.resolvent(b)) <=
          std::abs(a - b) + 1e-12);
    const double r = view.resolvent(a);
    CHECK(r > 0.0);
    CHECK(r < 1.0);
  }
}

TEST_CASE("yosida derivative: identity, Lipschitz, monotone in lambda") {
  PotentialSplit pot;
  RngStream rng(7, 0, 0, StreamPurpose::init_field);

  {
    const YosidaView view{pot, 0.05};
    CHECK(view.prime(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    // defined outside (0, 1) too
    const double p2 = view.prime(2.0);
    CHECK(p2 > 0.0);
    CHECK(std::isfinite(p2));
    CHECK(view.resolvent(2.0) < 1.0);
  }

  for (int k = 0; k < 10000; ++k) {
    const double lambda = std::pow(10.0, -4.0 * rng.uniform());
    const double s = -2.0 + 5.0 * rng.uniform();
    const YosidaView view{pot, lambda};
    CHECK(std::abs(lambda * view.prime(s) + view.resolvent(s) - s) <= 1e-10);
  }

  for (int k = 0; k < 10000; ++k) {
    const double lambda = std::pow(10.0, -3.0 * rng.uniform());
    const double a = -2.0 + 5.0 * rng.uniform();
    const double b = -2.0 + 5.0 * rng.uniform();
    const YosidaView view{pot, lambda};
    CHECK(std::abs(view.prime(a) - view.prime(b)) <=
          std::abs(a - b) / lambda + 1e-12);
  }

  // |psi'_lambda| grows monotonically as lambda decreases
  for (int k = 0; k < 2000; ++k) {
    const double s = -1.0 + 3.0 * rng.uniform();
    const double p1 = std::abs(YosidaView{pot, 1e-1}.prime(s));
    const double p2 = std::abs(YosidaView{pot, 1e-2}.prime(s));
    const double p3 = std::abs(YosidaView{pot, 1e-3}.prime(s));
    CHECK(p1 <= p2 + 1e-9);
    CHECK(p2 <= p3 + 1e-9);
  }
}

TEST_CASE("yosida value: Moreau envelope properties") {
  PotentialSplit pot;
  CHECK(YosidaView{pot, 0.1}.value(0.5) ==
        doctest::Approx(pot.psi(0.5)).epsilon(1e-12));

  // monotone convergence from below at s = 0.9
  const double exact = pot.psi(0.9);
  double prev = -1e300;
  for (double lambda : {0.1, 0.01, 0.001}) {
    const double v = YosidaView{pot, lambda}.value(0.9);
    CHECK(v <= exact + 1e-12);
    CHECK(v >= prev - 1e-12);
    prev = v;
  }
  CHECK(std::abs(prev - exact) <= 1e-3);

  RngStream rng(8, 0, 0, StreamPurpose::init_field);
  for (int k = 0; k < 10000; ++k) {
    const double lambda = std::pow(10.0, -3.0 * rng.uniform());
    const YosidaView view{pot, lambda};
    const double a = -2.0 + 5.0 * rng.uniform();
    const double b = -2.0 + 5.0 * rng.uniform();
    CHECK(view.value(0.5 * (a + b)) <=
          0.5 * (view.value(a) + view.value(b)) + 1e-10);
  }
}

TEST_CASE("psi_second convexity and coercivity of phi'") {
  PotentialSplit pot;
  RngStream rng(9, 0, 0, StreamPurpose::init_field);
  for (int k = 0; k < 10000; ++k) {
    const double a = 1e-3 + 0.998 * rng.uniform();
    const double b = 1e-3 + 0.998 * rng.uniform();
    CHECK(pot.psi_second(0.5 * (a + b)) <=
          0.5 * (pot.psi_second(a) + pot.psi_second(b)) + 1e-12);
    CHECK(std::abs(pot.psi_second(a) * a * (1.0 - a) - pot.theta) <= 1e-12);
  }

  // calibrate (C0, C1) on a coarse grid, validate on a 10x finer grid
  const double c0 = 1.0;
  double c1 = 0.0;
  for (int k = 1; k < 10000; ++k) {
    const double s = k / 10000.0;
    c1 = std::max(c1, c0 * s * s - pot.phi_prime(s) * s);
  }
  c1 += 1e-6;
  for (int k = 1; k < 100000; ++k) {
    const double s = k / 100000.0;
    CHECK(pot.phi_prime(s) * s >= c0 * s * s - c1 - 1e-9);
  }
}

TEST_CASE("free energy: constant field value and domain guard") {
  const Mesh mesh = build_mesh(8, BcKind::neumann);
  const SparseOperator k = assemble_stiffness(mesh);
  const Field lumped = lumped_mass(mesh);
  PotentialSplit pot;

  const Field half(mesh.node_count(), 0.5);
  // gradient term vanishes, well term vanishes at 1/2: E = psi(1/2) |O|
  CHECK(free_energy(half, k, lumped, pot, 0.37) ==
        doctest::Approx(-0.34657359027997264).epsilon(1e-13));

  Field bad = half;
  bad[3] = 1.5;
  CHECK_THROWS_AS(free_energy(bad, k, lumped, pot, 1.0), std::domain_error);

  // 1/2 is a critical point: small perturbations cannot lower the energy
  // beyond O(perturbation^2) (here Phi''(1/2) = 0, so only the gradient
  // term contributes at second order)
  const double base = free_energy(half, k, lumped, pot, 1e-3);
  RngStream rng(10, 0, 0, StreamPurpose::init_field);
  for (int trial = 0; trial < 20; ++trial) {
    Field pert = half;
    for (auto& v : pert) v += 1e-3 * (2.0 * rng.uniform() - 1.0);
    CHECK(free_energy(pert, k, lumped, pot, 1e-3) >= base - 1e-9);
  }
}
