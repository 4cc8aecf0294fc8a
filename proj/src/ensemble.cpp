#include "acsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

namespace acsim {

EnsembleStats run_ensemble(const FemSystem& fem, const PotentialSplit& pot,
                           const RunParams& params, int n_realizations,
                           std::uint64_t seed, int n_threads) {
  if (n_realizations < 1)
    throw std::invalid_argument("ensemble: n_realizations must be >= 1");

  EnsembleStats stats;
  stats.records.resize(n_realizations);
  std::vector<char> failed(n_realizations, 0);

  if (n_threads <= 0)
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min(n_threads, n_realizations));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= n_realizations) return;
      try {
        stats.records[id] = run_realization(fem, pot, params, seed, id);
      } catch (const StepFailure&) {
        failed[id] = 1;
      }
    }
  };
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (int id = 0; id < n_realizations; ++id)
    if (failed[id]) stats.failed_realizations.push_back(id);

  int first_ok = -1;
  for (int id = 0; id < n_realizations; ++id)
    if (!failed[id]) {
      first_ok = id;
      break;
    }
  if (first_ok < 0) return stats;  // everything failed; caller sees the list

  const std::size_t n_times = stats.records[first_ok].times.size();
  stats.times = stats.records[first_ok].times;
  stats.mean_total_damage.assign(n_times, 0.0);
  stats.std_total_damage.assign(n_times, 0.0);
  stats.mean_sq_h_norm.assign(n_times, 0.0);
  stats.mean_umin.assign(n_times, 0.0);
  stats.min_umin.assign(n_times, std::numeric_limits<double>::infinity());
  stats.mean_umax.assign(n_times, 0.0);
  stats.max_umax.assign(n_times, -std::numeric_limits<double>::infinity());

  int n_ok = 0;
  for (int id = 0; id < n_realizations; ++id) {
    if (failed[id]) continue;
    ++n_ok;
    const RunRecord& r = stats.records[id];
    for (std::size_t k = 0; k < n_times; ++k) {
      stats.mean_total_damage[k] += r.total_damage[k];
      stats.mean_sq_h_norm[k] += r.sq_h_norm[k];
      stats.mean_umin[k] += r.u_min[k];
      stats.min_umin[k] = std::min(stats.min_umin[k], r.u_min[k]);
      stats.mean_umax[k] += r.u_max[k];
      stats.max_umax[k] = std::max(stats.max_umax[k], r.u_max[k]);
    }
  }
  for (std::size_t k = 0; k < n_times; ++k) {
    stats.mean_total_damage[k] /= n_ok;
    stats.mean_sq_h_norm[k] /= n_ok;
    stats.mean_umin[k] /= n_ok;
    stats.mean_umax[k] /= n_ok;
  }
  if (n_ok >= 2) {
    for (int id = 0; id < n_realizations; ++id) {
      if (failed[id]) continue;
      const RunRecord& r = stats.records[id];
      for (std::size_t k = 0; k < n_times; ++k) {
        const double d = r.total_damage[k] - stats.mean_total_damage[k];
        stats.std_total_damage[k] += d * d;
      }
    }
    for (std::size_t k = 0; k < n_times; ++k)
      stats.std_total_damage[k] = std::sqrt(stats.std_total_damage[k] / (n_ok - 1));
  }
  return stats;
}

namespace {

// Least-squares slope of log(y) on t over the window [t_lo, t_hi].
double log_linear_slope(const std::vector<double>& t,
                        const std::vector<double>& y, double t_lo,
                        double t_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t_lo || t[k] > t_hi) continue;
    if (!(y[k] > 0.0)) continue;
    const double ly = std::log(y[k]);
    sx += t[k];
    sy += ly;
    sxx += t[k] * t[k];
    sxy += t[k] * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

}  // namespace

CouplingRecord coupled_decay(const FemSystem& fem, const PotentialSplit& pot,
                             const RunParams& params, const Field& x0,
                             const Field& y0, int n_pairs, std::uint64_t seed) {
  if (n_pairs < 1)
    throw std::invalid_argument("coupled_decay: n_pairs must be >= 1");
  for (std::size_t i = 0; i < x0.size(); ++i)
    if (!(x0[i] > 0.0 && x0[i] < pot.barrier && y0[i] > 0.0 &&
          y0[i] < pot.barrier))
      throw std::domain_error("coupled_decay: initial data outside (0, L)");

  const int n_steps = params.scheme.step_count();
  const double tau = params.scheme.tau;
  CouplingRecord rec;
  rec.times.resize(n_steps + 1);
  for (int k = 0; k <= n_steps; ++k) rec.times[k] = k * tau;
  rec.mean_sq_distance.assign(n_steps + 1, 0.0);

  const WienerSampler wiener_sampler(fem.mesh, params.wiener);
  const JumpOperator jump_op(fem.mesh, params.jump);
  const bool use_wiener = params.wiener.c_noise > 0.0;
  const bool use_jumps = params.jump.lambda_jump > 0.0;
  const Field zeros(fem.mesh.node_count(), 0.0);

  rec.pair_sq_distance.assign(n_pairs,
                              std::vector<double>(n_steps + 1, 0.0));
  for (int pair = 0; pair < n_pairs; ++pair) {
    Stepper stepper_x(fem, pot, params.scheme);
    Stepper stepper_y(fem, pot, params.scheme);
    Field ux = x0, uy = y0;
    stepper_x.pin_boundary(ux);
    stepper_y.pin_boundary(uy);
    rec.pair_sq_distance[pair][0] = lumped_sq_distance(fem.lumped, ux, uy);
    rec.mean_sq_distance[0] += rec.pair_sq_distance[pair][0];

    for (int step = 0; step < n_steps; ++step) {
      Field wiener_x = zeros, wiener_y = zeros;
      if (use_wiener) {
        const Field inc = wiener_sampler.sample_increment(tau, seed, pair, step);
        wiener_x = apply_prefactor(ux, inc, params.wiener.c_noise);
        wiener_y = apply_prefactor(uy, inc, params.wiener.c_noise);
      }
      Field jump_x = zeros, jump_y = zeros, f2_x = zeros, f2_y = zeros;
      if (use_jumps) {
        const JumpBatch batch = sample_batch(params.jump, tau, seed, pair, step);
        auto ix = jump_op.assemble(ux, batch, tau);
        auto iy = jump_op.assemble(uy, batch, tau);
        jump_x = std::move(ix.delta_j);
        f2_x = std::move(ix.f2_field);
        jump_y = std::move(iy.delta_j);
        f2_y = std::move(iy.f2_field);
      }
      ux = stepper_x.imex_step(ux, wiener_x, jump_x, f2_x, step).u;
      uy = stepper_y.imex_step(uy, wiener_y, jump_y, f2_y, step).u;
      rec.pair_sq_distance[pair][step + 1] =
          lumped_sq_distance(fem.lumped, ux, uy);
      rec.mean_sq_distance[step + 1] += rec.pair_sq_distance[pair][step + 1];
    }
  }
  for (auto& v : rec.mean_sq_distance) v /= n_pairs;

  const double t_final = params.scheme.t_final;
  rec.fitted_rate = log_linear_slope(rec.times, rec.mean_sq_distance,
                                     0.25 * t_final, t_final);
  return rec;
}

MomentReport moment_bound_check(const EnsembleStats& stats,
                                const PotentialSplit& pot) {
  MomentReport report;
  report.bound = pot.barrier * pot.barrier + 1e-9;  // |O| = 1
  for (std::size_t k = 0; k < stats.times.size(); ++k) {
    const double v = stats.mean_sq_h_norm[k];
    report.sup_mean_sq_h_norm = std::max(report.sup_mean_sq_h_norm, v);
    if (v > report.bound) {
      report.bounded = false;
      report.violating_times.push_back(stats.times[k]);
    }
  }
  const std::size_t n = stats.times.size();
  if (n >= 4) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = 3 * n / 4; k < n; ++k) {
      lo = std::min(lo, stats.mean_sq_h_norm[k]);
      hi = std::max(hi, stats.mean_sq_h_norm[k]);
    }
    report.plateau_drift = hi - lo;
  }
  return report;
}

double time_average_functional(const RunRecord& record, Functional phi,
                               double burn_in) {
  if (record.times.size() < 2)
    throw std::invalid_argument("time_average: record too short");
  const double t_final = record.times.back();
  if (!(burn_in < t_final))
    throw std::invalid_argument("time_average: burn_in must be < T");
  const double tau = record.times[1] - record.times[0];
  const std::vector<double>& series =
      phi == Functional::total_damage ? record.total_damage
                                      : record.free_energy;
  double sum = 0.0;
  for (std::size_t k = 0; k < record.times.size(); ++k)
    if (record.times[k] > burn_in + 1e-12 * t_final) sum += tau * series[k];
  return sum / (t_final - burn_in);
}

CauchyReport yosida_cauchy_check(const FemSystem& fem,
                                 const PotentialSplit& pot,
                                 const RunParams& params,
                                 std::vector<double> lambdas,
                                 std::uint64_t seed) {
  if (lambdas.size() < 2)
    throw std::invalid_argument("yosida_cauchy: need at least two lambdas");
  std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());

  // Record the full trajectory of every run through the snapshot sink.
  auto trajectory = [&](BarrierMode mode, double lambda) {
    RunParams p = params;
    p.scheme.mode = mode;
    p.scheme.yosida_lambda = lambda;
    p.snapshot_times.clear();
    const int n_steps = p.scheme.step_count();
    for (int k = 0; k <= n_steps; ++k)
      p.snapshot_times.push_back(k * p.scheme.tau);
    std::vector<Field> fields;
    fields.reserve(n_steps + 1);
    RunSinks sinks;
    sinks.snapshot = [&fields](double, const Field& u) { fields.push_back(u); };
    run_realization(fem, pot, p, seed, 0, &sinks);
    return fields;
  };

  const std::vector<Field> exact =
      trajectory(BarrierMode::exact_barrier, lambdas.front());
  std::vector<std::vector<Field>> runs;
  runs.reserve(lambdas.size());
  for (double lambda : lambdas)
    runs.push_back(trajectory(BarrierMode::yosida, lambda));

  auto sup_sq_distance = [&](const std::vector<Field>& a,
                             const std::vector<Field>& b) {
    double sup = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
      sup = std::max(sup, lumped_sq_distance(fem.lumped, a[k], b[k]));
    return sup;
  };

  CauchyReport report;
  report.lambdas = lambdas;
  for (const auto& run : runs)
    report.sup_diff_sq_exact.push_back(sup_sq_distance(run, exact));
  for (std::size_t i = 0; i + 1 < runs.size(); ++i)
    report.sup_diff_sq_consecutive.push_back(
        sup_sq_distance(runs[i], runs[i + 1]));

  report.decreasing_vs_exact = true;
  for (std::size_t i = 0; i + 1 < report.sup_diff_sq_exact.size(); ++i)
    if (!(report.sup_diff_sq_exact[i + 1] < report.sup_diff_sq_exact[i]))
      report.decreasing_vs_exact = false;

  // sup-diff ~ c * lambda against the exact reference, least squares in c
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    num += report.sup_diff_sq_exact[i] * lambdas[i];
    den += lambdas[i] * lambdas[i];
  }
  report.fitted_scale = den > 0.0 ? num / den : 0.0;
  return report;
}

}  // namespace acsim
