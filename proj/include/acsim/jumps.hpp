#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "acsim/field.hpp"
#include "acsim/mesh.hpp"

namespace acsim {

enum class JumpAmplitude {
  bilinear,  // A(u) = u (1-u) / 2
  affine,    // A(u) = (1-u) / 2
};

struct JumpConfig {
  double lambda_jump = 0.0;  // events per unit area and time
  double sigma_track = 0.1;  // Gaussian track width
  JumpAmplitude amplitude = JumpAmplitude::bilinear;
  bool compensated = true;
  // When uncompensated, route the compensator drift through the explicit F2
  // term instead of dropping it (same step, different bookkeeping).
  bool f2_carries_compensator = false;

  void validate() const;
};

// Events of one time step: Poisson count and uniform marks on (0,1)^2.
struct JumpBatch {
  int count = 0;
  std::vector<std::array<double, 2>> marks;
};

JumpBatch sample_batch(const JumpConfig& config, double dt, std::uint64_t seed,
                       std::uint64_t realization, std::uint64_t step);

// Gaussian track kernel exp(-|x-z|^2 / (2 sigma^2)).
double track_kernel(const std::array<double, 2>& x,
                    const std::array<double, 2>& z, double sigma);

double jump_amplitude(JumpAmplitude kind, double u);

// Jump increments on a fixed mesh. The kernel integral per node (the
// u-independent part of the compensator) is precomputed on construction by
// midpoint quadrature over cells inside the 4*sigma truncation disc.
class JumpOperator {
 public:
  JumpOperator(const Mesh& mesh, const JumpConfig& config);

  // sum_k A(u_i) kappa(x_i; z_k), truncated beyond radius 4 sigma
  Field raw_increment(const Field& u, const JumpBatch& batch) const;

  // dt * lambda_jump * A(u_i) * int_O kappa(x_i; z) dz
  Field compensator_field(const Field& u, double dt) const;

  // Compensated: raw - compensator, f2 = 0. Uncompensated: raw, or
  // (raw - compensator) with f2 = compensator / dt when F2 carries it.
  struct Increment {
    Field delta_j;
    Field f2_field;
  };
  Increment assemble(const Field& u, const JumpBatch& batch, double dt) const;

  const Field& kernel_mass() const { return kernel_mass_; }

 private:
  const Mesh* mesh_;
  JumpConfig config_;
  Field kernel_mass_;  // int_O kappa(x_i; z) dz per node
};

}  // namespace acsim
