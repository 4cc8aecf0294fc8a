#pragma once

#include <cstdint>
#include <vector>

#include "acsim/stepper.hpp"

namespace acsim {

// Cross-realization statistics, aligned with RunRecord::times. Realizations
// are keyed by id, so results do not depend on scheduling order.
struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_total_damage;
  std::vector<double> std_total_damage;
  std::vector<double> mean_sq_h_norm;
  std::vector<double> mean_umin;
  std::vector<double> min_umin;
  std::vector<double> mean_umax;
  std::vector<double> max_umax;
  std::vector<RunRecord> records;
  std::vector<int> failed_realizations;  // step-failure ids, results partial
};

EnsembleStats run_ensemble(const FemSystem& fem, const PotentialSplit& pot,
                           const RunParams& params, int n_realizations,
                           std::uint64_t seed, int n_threads = 0);

// Synchronous coupling of two initial data under shared Wiener and jump
// streams. fitted_rate is the least-squares slope of log mean-square distance
// over the window [T/4, T] (0 when the distance vanishes identically).
struct CouplingRecord {
  std::vector<double> times;
  std::vector<double> mean_sq_distance;
  std::vector<std::vector<double>> pair_sq_distance;  // [pair][time]
  double fitted_rate = 0.0;
};

CouplingRecord coupled_decay(const FemSystem& fem, const PotentialSplit& pot,
                             const RunParams& params, const Field& x0,
                             const Field& y0, int n_pairs, std::uint64_t seed);

// Uniform-boundedness surrogate of the moment estimate: with u in (0, L)
// pointwise, E||u||_H^2 <= |O| L^2 = 1 must hold at every time.
struct MomentReport {
  double sup_mean_sq_h_norm = 0.0;
  double bound = 1.0 + 1e-9;
  bool bounded = true;
  std::vector<double> violating_times;
  double plateau_drift = 0.0;  // spread of the last quarter of the series
};

MomentReport moment_bound_check(const EnsembleStats& stats,
                                const PotentialSplit& pot);

enum class Functional { total_damage, energy };

// Empirical time average (1/(T - burn_in)) sum tau * phi(u(t)) over t > burn_in.
double time_average_functional(const RunRecord& record, Functional phi,
                               double burn_in);

// Lambda-Cauchy trend: runs the scheme for each lambda under shared streams
// plus one exact-barrier reference, and reports sup_t ||u_l1 - u_l2||_H^2 to
// check the differences shrink as lambda decreases.
struct CauchyReport {
  std::vector<double> lambdas;              // descending
  std::vector<double> sup_diff_sq_exact;    // vs exact-barrier reference
  std::vector<double> sup_diff_sq_consecutive;  // lambda_i vs lambda_{i+1}
  bool decreasing_vs_exact = false;
  double fitted_scale = 0.0;  // c in sup-diff ~ c * (l1 + l2), least squares
};

CauchyReport yosida_cauchy_check(const FemSystem& fem,
                                 const PotentialSplit& pot,
                                 const RunParams& params,
                                 std::vector<double> lambdas,
                                 std::uint64_t seed);

}  // namespace acsim
