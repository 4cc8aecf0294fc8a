#include "acsim/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "acsim/rng.hpp"
#include "acsim/solver.hpp"

namespace acsim {

int SchemeConfig::step_count() const {
  return static_cast<int>(std::lround(t_final / tau));
}

void SchemeConfig::validate(const PotentialSplit& pot) const {
  pot.validate();
  if (!(tau > 0.0)) throw std::invalid_argument("scheme: tau must be > 0");
  if (!(t_final >= tau))
    throw std::invalid_argument("scheme: t_final must be >= tau");
  if (!(eps > 0.0)) throw std::invalid_argument("scheme: eps must be > 0");
  if (!(newton_tol > 0.0))
    throw std::invalid_argument("scheme: newton_tol must be > 0");
  if (newton_max_iter < 1)
    throw std::invalid_argument("scheme: newton_max_iter must be >= 1");
  if (mode == BarrierMode::yosida && !(yosida_lambda > 0.0))
    throw std::invalid_argument("scheme: yosida_lambda must be > 0");
  if (splitting == Splitting::paper) {
    // The implicit Jacobian diagonal is 1 + tau (Psi'' - f1_coeff); keep the
    // linear perturbation from destroying positive definiteness.
    if (!(tau * pot.f1_coeff * pot.theta0 < 1.0) ||
        !(tau * pot.f1_coeff < 1.0))
      throw std::invalid_argument(
          "scheme: tau * f1_coeff * theta0 must be < 1 for the paper splitting");
  }
}

FemSystem build_fem_system(int n, BcKind bc) {
  FemSystem fem;
  fem.mesh = build_mesh(n, bc);
  fem.mass = assemble_mass(fem.mesh);
  fem.stiffness = assemble_stiffness(fem.mesh);
  fem.lumped = lumped_mass(fem.mesh);
  return fem;
}

Stepper::Stepper(const FemSystem& fem, const PotentialSplit& pot,
                 const SchemeConfig& scheme)
    : fem_(&fem), pot_(pot), scheme_(scheme) {
  scheme_.validate(pot_);
  if (scheme_.mode == BarrierMode::yosida)
    yosida_ = YosidaView{pot_, scheme_.yosida_lambda};
  const int n = fem.mesh.node_count();
  pinned_.assign(n, 0);
  pinned_values_.assign(n, 0.0);
  active_.assign(n, 0);
  kdiag_.resize(n);
  for (int i = 0; i < n; ++i) kdiag_[i] = fem.stiffness.diagonal(i);
  rhs_.resize(n);
  res_.resize(n);
  jac_diag_.resize(n);
  precond_.resize(n);
  trial_.resize(n);
}

void Stepper::pin_boundary(const Field& datum) {
  if (fem_->mesh.bc != BcKind::dirichlet) return;
  for (int b : fem_->mesh.boundary_nodes) {
    pinned_[b] = 1;
    pinned_values_[b] = datum[b];
  }
}

double Stepper::drift(double s) const {
  double d = yosida_ ? yosida_->prime(s) : pot_.psi_prime(s);
  if (scheme_.splitting == Splitting::paper) d += pot_.f1(s);
  return d;
}

double Stepper::drift_slope(double s) const {
  double d = yosida_ ? yosida_->second(s) : pot_.psi_second(s);
  if (scheme_.splitting == Splitting::paper) d -= pot_.f1_coeff;
  return d;
}

double Stepper::residual(const Field& u, const Field& rhs, Field& out) {
  const Field& m = fem_->lumped;
  fem_->stiffness.multiply(u, out);
  const double tau = scheme_.tau;
  const double te = tau * scheme_.eps;
  const bool exact = scheme_.mode == BarrierMode::exact_barrier;
  const double lo = kBoundMargin;
  const double hi = pot_.barrier - kBoundMargin;
  double norm = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    active_[i] = 0;
    if (pinned_[i]) {
      out[i] = 0.0;
      continue;
    }
    double r = m[i] * u[i] + te * out[i] + tau * m[i] * drift(u[i]) - rhs[i];
    // Bound-constrained solve: when the explicit data pushes past what the
    // barrier can match inside the representable box, the projected solution
    // sits at the clamp with a one-sided residual.
    if (exact) {
      if (u[i] >= hi && r < 0.0) {
        r = 0.0;
        active_[i] = 1;
      } else if (u[i] <= lo && r > 0.0) {
        r = 0.0;
        active_[i] = 1;
      }
    }
    out[i] = r;
    double excess = std::abs(r);
    if (exact && excess > 0.0) {
      // Near the barrier the root can fall between adjacent doubles; a node
      // whose residual is within one lattice step of zero is converged.
      const double slope =
          m[i] * (1.0 + tau * std::max(0.0, drift_slope(u[i]))) +
          te * kdiag_[i];
      const double quant =
          2.0 * slope * 2.3e-16 * std::max(1.0, std::abs(u[i]));
      excess = std::max(0.0, excess - quant);
    }
    norm = std::max(norm, excess);
  }
  return norm;
}

Stepper::StepResult Stepper::imex_step(const Field& u_n,
                                       const Field& wiener_term,
                                       const Field& jump_term,
                                       const Field& f2_field, int step_index) {
  const Field& m = fem_->lumped;
  const double tau = scheme_.tau;
  const double te = tau * scheme_.eps;
  const bool exact = scheme_.mode == BarrierMode::exact_barrier;
  const double lo = kBoundMargin;
  const double hi = pot_.barrier - kBoundMargin;

  for (std::size_t i = 0; i < u_n.size(); ++i) {
    double explicit_part = u_n[i] + tau * f2_field[i] + wiener_term[i] +
                           jump_term[i];
    if (scheme_.splitting == Splitting::convex_split)
      explicit_part -= tau * pot_.well_prime(u_n[i]);
    rhs_[i] = m[i] * explicit_part;
  }

  StepResult result;
  result.u = u_n;
  if (exact)
    for (auto& v : result.u) v = std::clamp(v, lo, hi);
  for (std::size_t i = 0; i < u_n.size(); ++i)
    if (pinned_[i]) result.u[i] = pinned_values_[i];

  double rnorm = residual(result.u, rhs_, res_);
  result.newton_iters = 0;

  const bool dbg = std::getenv("ACSIM_NEWTON_TRACE") != nullptr;
  while (rnorm > scheme_.newton_tol) {
    if (dbg) {
      int nact = 0;
      for (char a : active_) nact += a;
      std::fprintf(stderr, "  newton it=%d rnorm=%.3e active=%d\n",
                   result.newton_iters, rnorm, nact);
    }
    if (result.newton_iters >= scheme_.newton_max_iter)
      throw StepFailure("newton did not converge", step_index, rnorm);
    ++result.newton_iters;

    for (std::size_t i = 0; i < result.u.size(); ++i) {
      jac_diag_[i] = m[i] * (1.0 + tau * drift_slope(result.u[i]));
      precond_[i] = (pinned_[i] || active_[i])
                        ? 1.0
                        : 1.0 / (jac_diag_[i] + te * kdiag_[i]);
    }
    Field neg_res(res_.size());
    for (std::size_t i = 0; i < res_.size(); ++i) neg_res[i] = -res_[i];

    auto apply = [this, te](const Field& x, Field& y) {
      fem_->stiffness.multiply(x, y);
      for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = (pinned_[i] || active_[i]) ? x[i]
                                          : jac_diag_[i] * x[i] + te * y[i];
    };
    const Field delta = solve_spd_apply(apply, neg_res, precond_,
                                        scheme_.cg_tol, scheme_.cg_max_iter);

    // damped update, trials projected into the representable box
    double alpha = 1.0;
    double best_alpha = alpha;
    double best_norm = std::numeric_limits<double>::infinity();
    for (int bt = 0; bt <= scheme_.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < delta.size(); ++i) {
        double v = result.u[i] + alpha * delta[i];
        if (exact) v = std::clamp(v, lo, hi);
        trial_[i] = v;
      }
      const double tnorm = residual(trial_, rhs_, res_);
      if (tnorm < best_norm) {
        best_norm = tnorm;
        best_alpha = alpha;
      }
      if (tnorm <= (1.0 - 1e-4 * alpha) * rnorm) break;
      alpha *= 0.5;
    }
    if (best_alpha != alpha) {
      // recompute the best trial (the loop left res_ at the last alpha)
      for (std::size_t i = 0; i < delta.size(); ++i) {
        double v = result.u[i] + best_alpha * delta[i];
        if (exact) v = std::clamp(v, lo, hi);
        trial_[i] = v;
      }
      best_norm = residual(trial_, rhs_, res_);
    }
    result.u.swap(trial_);
    rnorm = best_norm;
  }

  if (exact)
    for (std::size_t i = 0; i < result.u.size(); ++i)
      if (!(result.u[i] > 0.0 && result.u[i] < pot_.barrier))
        throw std::logic_error("exact-barrier step produced a value outside (0, L)");
  return result;
}

double Stepper::record_energy(const Field& u) const {
  if (yosida_)
    return free_energy_yosida(u, fem_->stiffness, fem_->lumped, *yosida_,
                              scheme_.eps);
  return free_energy(u, fem_->stiffness, fem_->lumped, pot_, scheme_.eps);
}

Field initial_datum(Scenario scenario, const Mesh& mesh, double eps,
                    double amplitude, double radius, const WienerConfig& wiener,
                    std::uint64_t seed, std::uint64_t realization) {
  const int n_nodes = mesh.node_count();
  Field u(n_nodes);
  if (scenario == Scenario::circle) {
    const double width = std::sqrt(2.0 * eps);
    for (int i = 0; i < n_nodes; ++i) {
      const double dx = mesh.nodes[i][0] - 0.5;
      const double dy = mesh.nodes[i][1] - 0.5;
      const double dist = std::sqrt(dx * dx + dy * dy);
      u[i] = 0.5 * (1.0 - std::tanh((radius - dist) / width));
    }
    return u;
  }

  // 0.5 plus a mean-zero truncated sine perturbation scaled to |eta|_inf =
  // amplitude, clipped as a safety net.
  RngStream rng(seed, realization, 0, StreamPurpose::init_field);
  Field eta = sine_field_nodes(mesh, wiener.n_modes, rng);
  const Field lumped = lumped_mass(mesh);
  double mass = 0.0, mean = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    mass += lumped[i];
    mean += lumped[i] * eta[i];
  }
  mean /= mass;
  for (auto& v : eta) v -= mean;
  const double peak = inf_norm(eta);
  const double scale = peak > 0.0 ? amplitude / peak : 0.0;
  for (int i = 0; i < n_nodes; ++i)
    u[i] = std::clamp(0.5 + scale * eta[i], 0.01, 0.99);
  return u;
}

RunRecord run_realization(const FemSystem& fem, const PotentialSplit& pot,
                          const RunParams& params, std::uint64_t seed,
                          std::uint64_t realization, const RunSinks* sinks) {
  params.wiener.validate();
  params.jump.validate();
  Stepper stepper(fem, pot, params.scheme);
  const int n_steps = params.scheme.step_count();
  const double tau = params.scheme.tau;

  Field u = initial_datum(params.scenario, fem.mesh, params.scheme.eps,
                          params.init_amplitude, params.circle_radius,
                          params.wiener, seed, realization);
  stepper.pin_boundary(u);

  const WienerSampler wiener_sampler(fem.mesh, params.wiener);
  const JumpOperator jump_op(fem.mesh, params.jump);
  const bool use_wiener = params.wiener.c_noise > 0.0;
  const bool use_jumps = params.jump.lambda_jump > 0.0;
  const Field zeros(fem.mesh.node_count(), 0.0);

  RunRecord record;
  record.times.reserve(n_steps + 1);
  auto push_state = [&](double t, const Field& v) {
    record.times.push_back(t);
    record.total_damage.push_back(lumped_integral(fem.lumped, v));
    record.u_min.push_back(field_min(v));
    record.u_max.push_back(field_max(v));
    record.free_energy.push_back(stepper.record_energy(v));
    record.sq_h_norm.push_back(lumped_sq_norm(fem.lumped, v));
    if (params.scheme.mode == BarrierMode::yosida) {
      if (field_min(v) <= 0.0 || field_max(v) >= pot.barrier)
        ++record.confinement_violations;
    }
  };

  std::size_t next_snapshot = 0;
  auto maybe_snapshot = [&](double t, const Field& v) {
    while (next_snapshot < params.snapshot_times.size() &&
           params.snapshot_times[next_snapshot] <= t + 0.5 * tau) {
      if (sinks && sinks->snapshot)
        sinks->snapshot(params.snapshot_times[next_snapshot], v);
      ++next_snapshot;
    }
  };

  push_state(0.0, u);
  maybe_snapshot(0.0, u);

  for (int step = 0; step < n_steps; ++step) {
    const double t_next = (step + 1) * tau;

    Field wiener_term = zeros;
    if (use_wiener) {
      const Field inc =
          wiener_sampler.sample_increment(tau, seed, realization, step);
      wiener_term = apply_prefactor(u, inc, params.wiener.c_noise);
    }

    JumpBatch batch;
    Field jump_term = zeros;
    Field f2_field = zeros;
    if (use_jumps) {
      batch = sample_batch(params.jump, tau, seed, realization, step);
      auto inc = jump_op.assemble(u, batch, tau);
      jump_term = std::move(inc.delta_j);
      f2_field = std::move(inc.f2_field);
      if (sinks && sinks->jump_event)
        for (const auto& z : batch.marks)
          sinks->jump_event(step, t_next, z[0], z[1]);
    }

    auto step_result = stepper.imex_step(u, wiener_term, jump_term, f2_field,
                                         step);
    u = std::move(step_result.u);
    record.newton_iters.push_back(step_result.newton_iters);
    record.jump_counts.push_back(batch.count);
    push_state(t_next, u);
    maybe_snapshot(t_next, u);
  }
  return record;
}

}  // namespace acsim
