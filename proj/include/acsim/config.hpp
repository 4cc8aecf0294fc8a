#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "acsim/ensemble.hpp"
#include "acsim/stepper.hpp"

namespace acsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key=value run configuration. parse/serialize round-trip exactly;
// unknown keys are rejected with the offending name.
struct RunConfig {
  // mesh
  int n = 64;
  BcKind bc = BcKind::neumann;
  // potential
  double theta = 0.5;
  double theta0 = 1.0;
  double barrier = 1.0;
  double f1_coeff = 4.0;  // 4 * theta0, see f1_coeff_is_default
  bool f1_coeff_explicit = false;
  // scheme
  double tau = 0.05;
  double t_final = 4.0;
  double eps = 1.0 / 1600.0;
  BarrierMode mode = BarrierMode::exact_barrier;
  double yosida_lambda = 1e-3;
  Splitting splitting = Splitting::paper;
  double newton_tol = 1e-10;
  int newton_max_iter = 60;
  // wiener
  double c_noise = 0.5;
  double wiener_alpha = 0.125;  // 2/wiener_modes: unit nodal variance
  int wiener_modes = 16;
  // jumps
  double lambda_jump = 0.0;
  double sigma_track = 0.1;
  JumpAmplitude jump_amplitude = JumpAmplitude::bilinear;
  bool jump_compensated = true;
  bool f2_compensator = false;
  // scenario
  Scenario scenario = Scenario::random_half;
  double init_amplitude = 0.05;
  double circle_radius = 0.4;
  // run
  std::uint64_t seed = 42;
  std::vector<double> snapshot_times;
  bool write_events = false;
  bool write_pgm = false;
  bool write_vtk = false;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

// Cross-module invariant checks (theta < theta0, tau * f1_coeff * theta0 < 1,
// sigma_track > 0, ...). Throws ConfigError naming the offending key.
void validate_config(const RunConfig& config);

PotentialSplit make_potential(const RunConfig& config);
RunParams make_run_params(const RunConfig& config);

}  // namespace acsim
