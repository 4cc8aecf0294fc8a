#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "acsim/field.hpp"
#include "acsim/jumps.hpp"
#include "acsim/mesh.hpp"
#include "acsim/potential.hpp"
#include "acsim/wiener.hpp"

namespace acsim {

enum class BarrierMode { exact_barrier, yosida };
enum class Splitting { paper, convex_split };
enum class Scenario { random_half, circle };

struct SchemeConfig {
  double tau = 0.05;
  double t_final = 4.0;
  double eps = 1.0 / 1600.0;
  BarrierMode mode = BarrierMode::exact_barrier;
  double yosida_lambda = 1e-3;
  Splitting splitting = Splitting::paper;
  double newton_tol = 1e-10;
  int newton_max_iter = 60;
  int max_backtracks = 40;
  double cg_tol = 1e-10;
  int cg_max_iter = 2000;

  int step_count() const;
  void validate(const PotentialSplit& pot) const;
};

struct StepFailure : std::runtime_error {
  StepFailure(const std::string& what, int step_, double residual_)
      : std::runtime_error(what), step(step_), residual(residual_) {}
  int step;
  double residual;
};

// Per-step observables of one realization. All per-state vectors have N+1
// entries (including t = 0); per-step counters have N.
struct RunRecord {
  std::vector<double> times;
  std::vector<double> total_damage;
  std::vector<double> u_min;
  std::vector<double> u_max;
  std::vector<double> free_energy;
  std::vector<double> sq_h_norm;
  std::vector<int> newton_iters;
  std::vector<int> jump_counts;
  int confinement_violations = 0;  // yosida mode only; exact mode can't leave
};

// Mesh plus its assembled operators, shared read-only across realizations.
struct FemSystem {
  Mesh mesh;
  SparseOperator mass;
  SparseOperator stiffness;
  Field lumped;
};

FemSystem build_fem_system(int n, BcKind bc);

// One IMEX Euler-Maruyama step solved by damped Newton:
//   M_L u + tau eps K u + tau M_L [Psi'_mode(u) + F1(u)]
//     = M_L [u^n + tau f2 + G(u^n) dW + dJ]
// with nodal (lumped) treatment of the nonlinearity. In exact-barrier mode
// every iterate stays strictly inside (0, L). A Stepper owns its scratch
// buffers; use one instance per concurrent realization.
class Stepper {
 public:
  Stepper(const FemSystem& fem, const PotentialSplit& pot,
          const SchemeConfig& scheme);

  // Dirichlet runs pin boundary nodes to the given datum's boundary trace.
  void pin_boundary(const Field& datum);

  struct StepResult {
    Field u;
    int newton_iters;
  };
  StepResult imex_step(const Field& u_n, const Field& wiener_term,
                       const Field& jump_term, const Field& f2_field,
                       int step_index = -1);

  double record_energy(const Field& u) const;

 private:
  // distance kept from the barrier endpoints inside the solver box
  static constexpr double kBoundMargin = 1e-14;

  double drift(double s) const;        // Psi'_mode + F1 (splitting-aware)
  double drift_slope(double s) const;  // derivative of drift
  // Residual of the nodal system; refreshes the active-bound mask.
  double residual(const Field& u, const Field& rhs, Field& out);

  const FemSystem* fem_;
  PotentialSplit pot_;
  SchemeConfig scheme_;
  std::optional<YosidaView> yosida_;
  std::vector<char> pinned_;
  Field pinned_values_;
  std::vector<char> active_;
  Field kdiag_;  // stiffness diagonal
  // scratch
  Field rhs_, res_, jac_diag_, precond_, trial_;
};

struct RunParams {
  SchemeConfig scheme;
  WienerConfig wiener;
  JumpConfig jump;
  Scenario scenario = Scenario::random_half;
  double init_amplitude = 0.05;  // random_half perturbation (inf-norm)
  double circle_radius = 0.4;
  std::vector<double> snapshot_times;
};

Field initial_datum(Scenario scenario, const Mesh& mesh, double eps,
                    double amplitude, double radius, const WienerConfig& wiener,
                    std::uint64_t seed, std::uint64_t realization);

// Optional per-run output hooks (snapshots, jump event log).
struct RunSinks {
  std::function<void(double t, const Field& u)> snapshot;
  std::function<void(int step, double t, double x, double y)> jump_event;
};

RunRecord run_realization(const FemSystem& fem, const PotentialSplit& pot,
                          const RunParams& params, std::uint64_t seed,
                          std::uint64_t realization,
                          const RunSinks* sinks = nullptr);

}  // namespace acsim
