#include <doctest.h>

#include <cmath>
#include <vector>

#include "acsim/rng.hpp"
#include "acsim/stepper.hpp"

using namespace acsim;

namespace {

std::vector<double> dense_gauss(std::vector<std::vector<double>> a,
                                std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int k = 0; k < n; ++k) {
    int pivot = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[pivot][k])) pivot = i;
    std::swap(a[k], a[pivot]);
    std::swap(b[k], b[pivot]);
    for (int i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (int j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (int i = n - 1; i >= 0; --i) {
    double s = b[i];
    for (int j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
    x[i] = s / a[i][i];
  }
  return x;
}

// Oracle: one full-system Newton solve with a dense Jacobian and dense
// elimination, independent of the CG/damping path inside the Stepper.
Field dense_newton_step(const FemSystem& fem, const PotentialSplit& pot,
                        const SchemeConfig& scheme, const Field& u_n,
                        const Field& wiener_term, const Field& jump_term) {
  const int n = fem.mesh.node_count();
  std::vector<std::vector<double>> k_dense(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int p = fem.stiffness.row_ptr[i]; p < fem.stiffness.row_ptr[i + 1];
         ++p)
      k_dense[i][fem.stiffness.col[p]] += fem.stiffness.val[p];

  const double tau = scheme.tau;
  const double te = tau * scheme.eps;
  Field rhs(n);
  for (int i = 0; i < n; ++i)
    rhs[i] = fem.lumped[i] * (u_n[i] + wiener_term[i] + jump_term[i]);

  Field u = u_n;
  for (int iter = 0; iter < 100; ++iter) {
    Field res(n, 0.0);
    double norm = 0.0;
    for (int i = 0; i < n; ++i) {
      double ku = 0.0;
      for (int j = 0; j < n; ++j) ku += k_dense[i][j] * u[j];
      res[i] = fem.lumped[i] * u[i] + te * ku +
               tau * fem.lumped[i] * (pot.psi_prime(u[i]) + pot.f1(u[i])) -
               rhs[i];
      norm = std::max(norm, std::abs(res[i]));
    }
    if (norm <= 1e-13) break;
    std::vector<std::vector<double>> jac(n, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) jac[i][j] = te * k_dense[i][j];
      jac[i][i] += fem.lumped[i] *
                   (1.0 + tau * (pot.psi_second(u[i]) - pot.f1_coeff));
    }
    Field neg(n);
    for (int i = 0; i < n; ++i) neg[i] = -res[i];
    const auto delta = dense_gauss(jac, neg);
    double step_scale = 1.0;
    for (int i = 0; i < n; ++i) {  // keep the oracle inside (0, 1) too
      if (delta[i] > 0.0)
        step_scale = std::min(step_scale, 0.995 * (1.0 - 1e-12 - u[i]) / delta[i]);
      else if (delta[i] < 0.0)
        step_scale = std::min(step_scale, 0.995 * (1e-12 - u[i]) / delta[i]);
    }
    for (int i = 0; i < n; ++i) u[i] += step_scale * delta[i];
  }
  return u;
}

Field deterministic_run(const FemSystem& fem, const PotentialSplit& pot,
                        SchemeConfig scheme, const Field& u0) {
  Stepper stepper(fem, pot, scheme);
  const Field zeros(fem.mesh.node_count(), 0.0);
  Field u = u0;
  const int steps = scheme.step_count();
  for (int s = 0; s < steps; ++s) u = stepper.imex_step(u, zeros, zeros, zeros, s).u;
  return u;
}

}  // namespace

TEST_CASE("constant 1/2 is a fixed point of the deterministic step") {
  const FemSystem fem = build_fem_system(8, BcKind::neumann);
  PotentialSplit pot;
  SchemeConfig scheme;
  Stepper stepper(fem, pot, scheme);

  const Field half(fem.mesh.node_count(), 0.5);
  const Field zeros(fem.mesh.node_count(), 0.0);
  const auto result = stepper.imex_step(half, zeros, zeros, zeros);
  CHECK(result.newton_iters == 0);  // residual vanishes identically
  CHECK(result.u == half);
}

TEST_CASE("imex step matches the dense-Newton oracle on a coarse mesh") {
  const FemSystem fem = build_fem_system(2, BcKind::neumann);
  PotentialSplit pot;
  SchemeConfig scheme;
  scheme.newton_tol = 1e-13;
  Stepper stepper(fem, pot, scheme);

  RngStream rng(51, 0, 0, StreamPurpose::init_field);
  for (int trial = 0; trial < 25; ++trial) {
    Field u_n(fem.mesh.node_count());
    Field wiener_term(fem.mesh.node_count());
    Field jump_term(fem.mesh.node_count());
    for (std::size_t i = 0; i < u_n.size(); ++i) {
      u_n[i] = 0.1 + 0.8 * rng.uniform();
      wiener_term[i] = 0.2 * (rng.uniform() - 0.5);
      jump_term[i] = 0.3 * rng.uniform();
    }
    const Field zeros(fem.mesh.node_count(), 0.0);
    const Field mine =
        stepper.imex_step(u_n, wiener_term, jump_term, zeros).u;
    const Field oracle =
        dense_newton_step(fem, pot, scheme, u_n, wiener_term, jump_term);
    for (std::size_t i = 0; i < mine.size(); ++i)
      CHECK(mine[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
  }
}

TEST_CASE("convex splitting dissipates the free energy without noise") {
  const FemSystem fem = build_fem_system(16, BcKind::neumann);
  PotentialSplit pot;

  RunParams params;
  params.scheme.tau = 0.05;
  params.scheme.t_final = 10.0;  // 200 steps
  params.scheme.splitting = Splitting::convex_split;
  params.wiener.c_noise = 0.0;
  params.jump.lambda_jump = 0.0;
  params.scenario = Scenario::random_half;
  params.init_amplitude = 0.3;

  const RunRecord record = run_realization(fem, pot, params, 77, 0);
  REQUIRE(record.free_energy.size() == 201);
  for (std::size_t k = 1; k < record.free_energy.size(); ++k)
    CHECK(record.free_energy[k] <= record.free_energy[k - 1] + 1e-10);
}

TEST_CASE("yosida runs approach the exact-barrier run as lambda shrinks") {
  const FemSystem fem = build_fem_system(16, BcKind::neumann);
  PotentialSplit pot;

  RunParams params;
  params.scheme.tau = 0.05;
  params.scheme.t_final = 0.5;
  params.wiener.c_noise = 0.5;
  params.jump.lambda_jump = 10.0;
  params.scenario = Scenario::random_half;

  auto final_field = [&](BarrierMode mode, double lambda) {
    RunParams p = params;
    p.scheme.mode = mode;
    p.scheme.yosida_lambda = lambda;
    p.snapshot_times = {p.scheme.t_final};
    Field captured;
    RunSinks sinks;
    sinks.snapshot = [&captured](double, const Field& u) { captured = u; };
    run_realization(fem, pot, p, 123, 0, &sinks);
    return captured;
  };

  const Field exact = final_field(BarrierMode::exact_barrier, 1e-3);
  const Field coarse = final_field(BarrierMode::yosida, 1e-3);
  const Field fine = final_field(BarrierMode::yosida, 1e-4);

  double d_coarse = 0.0, d_fine = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    d_coarse = std::max(d_coarse, std::abs(coarse[i] - exact[i]));
    d_fine = std::max(d_fine, std::abs(fine[i] - exact[i]));
  }
  CHECK(d_fine < d_coarse);
  CHECK(d_coarse > 0.0);
}

TEST_CASE("run_realization: conserved fixed point and determinism") {
  const FemSystem fem = build_fem_system(8, BcKind::neumann);
  PotentialSplit pot;

  RunParams params;
  params.scheme.t_final = 0.5;
  params.wiener.c_noise = 0.0;
  params.jump.lambda_jump = 0.0;
  params.scenario = Scenario::random_half;
  params.init_amplitude = 0.0;  // u identically 1/2

  const RunRecord record = run_realization(fem, pot, params, 9, 0);
  for (double v : record.total_damage)
    CHECK(v == doctest::Approx(0.5).epsilon(1e-13));
  for (int iters : record.newton_iters) CHECK(iters == 0);

  // bit-identical repetition under the same seed and parameters
  RunParams noisy = params;
  noisy.init_amplitude = 0.05;
  noisy.wiener.c_noise = 0.5;
  noisy.jump.lambda_jump = 10.0;
  const RunRecord a = run_realization(fem, pot, noisy, 9, 3);
  const RunRecord b = run_realization(fem, pot, noisy, 9, 3);
  CHECK(a.times == b.times);
  CHECK(a.total_damage == b.total_damage);
  CHECK(a.u_min == b.u_min);
  CHECK(a.u_max == b.u_max);
  CHECK(a.free_energy == b.free_energy);
  CHECK(a.sq_h_norm == b.sq_h_norm);
  CHECK(a.newton_iters == b.newton_iters);
  CHECK(a.jump_counts == b.jump_counts);

  const RunRecord c = run_realization(fem, pot, noisy, 9, 4);
  CHECK(a.total_damage != c.total_damage);
}

TEST_CASE("noisy runs stay strictly inside (0,1) in exact-barrier mode") {
  const FemSystem fem = build_fem_system(16, BcKind::neumann);
  PotentialSplit pot;

  RunParams params;
  params.scheme.t_final = 0.5;
  params.wiener.c_noise = 5.0;  // the paper's high-noise setting
  params.jump.lambda_jump = 100.0;
  params.jump.compensated = false;
  params.jump.amplitude = JumpAmplitude::affine;
  params.scenario = Scenario::circle;

  const RunRecord record = run_realization(fem, pot, params, 31, 0);
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    CHECK(record.u_min[k] > 0.0);
    CHECK(record.u_max[k] < 1.0);
  }
  CHECK(record.confinement_violations == 0);
}

TEST_CASE("tau refinement contracts at first order without noise") {
  const FemSystem fem = build_fem_system(16, BcKind::neumann);
  PotentialSplit pot;
  const Field u0 = initial_datum(Scenario::random_half, fem.mesh, 1.0 / 1600.0,
                                 0.2, 0.4, WienerConfig{}, 55, 0);

  SchemeConfig scheme;
  scheme.t_final = 1.0;
  scheme.tau = 0.1;
  const Field coarse = deterministic_run(fem, pot, scheme, u0);
  scheme.tau = 0.05;
  const Field mid = deterministic_run(fem, pot, scheme, u0);
  scheme.tau = 0.025;
  const Field fine = deterministic_run(fem, pot, scheme, u0);

  double d1 = 0.0, d2 = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) {
    d1 = std::max(d1, std::abs(coarse[i] - mid[i]));
    d2 = std::max(d2, std::abs(mid[i] - fine[i]));
  }
  const double order = std::log2(d1 / d2);
  CHECK(order >= 0.9);
}

TEST_CASE("initial data: circle saturation and random mean") {
  const Mesh mesh = build_mesh(64, BcKind::neumann);
  const double eps = 1.0 / 1600.0;

  const Field circle = initial_datum(Scenario::circle, mesh, eps, 0.05, 0.4,
                                     WienerConfig{}, 1, 0);
  const double center = circle[mesh.node_index(32, 32)];
  CHECK(center == doctest::Approx(1.4894902269e-10).epsilon(1e-6));
  const double corner = circle[mesh.node_index(0, 0)];
  CHECK(1.0 - corner == doctest::Approx(2.85222021384e-8).epsilon(1e-6));

  const Field lumped = lumped_mass(mesh);
  const Field random = initial_datum(Scenario::random_half, mesh, eps, 0.05,
                                     0.4, WienerConfig{}, 2, 0);
  CHECK(std::abs(lumped_integral(lumped, random) - 0.5) <= 1e-12);
  double peak = 0.0;
  for (double v : random) peak = std::max(peak, std::abs(v - 0.5));
  CHECK(peak == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(field_min(random) >= 0.01);
  CHECK(field_max(random) <= 0.99);
}

TEST_CASE("dirichlet runs pin the boundary to the initial trace") {
  const FemSystem fem = build_fem_system(8, BcKind::dirichlet);
  PotentialSplit pot;
  SchemeConfig scheme;
  Stepper stepper(fem, pot, scheme);

  const Field u0 = initial_datum(Scenario::circle, fem.mesh, 1.0 / 100.0, 0.05,
                                 0.4, WienerConfig{}, 3, 0);
  stepper.pin_boundary(u0);

  const WienerSampler sampler(fem.mesh, WienerConfig{});
  Field u = u0;
  for (int step = 0; step < 5; ++step) {
    const Field inc = sampler.sample_increment(scheme.tau, 3, 0, step);
    const Field wiener_term = apply_prefactor(u, inc, 0.5);
    const Field zeros(fem.mesh.node_count(), 0.0);
    u = stepper.imex_step(u, wiener_term, zeros, zeros, step).u;
    for (int b : fem.mesh.boundary_nodes) CHECK(u[b] == u0[b]);
  }
}

TEST_CASE("step failure and configuration guards") {
  const FemSystem fem = build_fem_system(8, BcKind::neumann);
  PotentialSplit pot;

  {
    SchemeConfig scheme;
    scheme.newton_max_iter = 1;
    scheme.newton_tol = 1e-12;
    Stepper stepper(fem, pot, scheme);
    const Field half(fem.mesh.node_count(), 0.5);
    Field push(fem.mesh.node_count());
    RngStream rng(60, 0, 0, StreamPurpose::init_field);
    for (auto& v : push) v = 0.6 * (rng.uniform() - 0.5);
    const Field zeros(fem.mesh.node_count(), 0.0);
    CHECK_THROWS_AS(stepper.imex_step(half, zeros, push, zeros, 12),
                    StepFailure);
    try {
      stepper.imex_step(half, zeros, push, zeros, 12);
    } catch (const StepFailure& e) {
      CHECK(e.step == 12);
      CHECK(e.residual > 0.0);
    }
  }

  {
    // tau f1_coeff theta0 >= 1 breaks the implicit Jacobian positivity
    SchemeConfig scheme;
    scheme.tau = 0.3;
    CHECK_THROWS_AS(Stepper(fem, pot, scheme), std::invalid_argument);
  }

  {
    SchemeConfig scheme;
    scheme.mode = BarrierMode::yosida;
    scheme.yosida_lambda = 0.0;
    CHECK_THROWS_AS(Stepper(fem, pot, scheme), std::invalid_argument);
  }
}
