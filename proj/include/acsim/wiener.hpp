#pragma once

#include <cstdint>
#include <vector>

#include "acsim/field.hpp"
#include "acsim/mesh.hpp"
#include "acsim/rng.hpp"

namespace acsim {

struct WienerConfig {
  double c_noise = 0.5;  // multiplicative prefactor scale
  // Per-mode amplitude. The default 2/n_modes gives the truncated expansion
  // unit pointwise variance, so c_noise alone sets the noise strength
  // independently of the truncation level.
  double alpha = 0.125;
  int n_modes = 16;  // truncation per direction

  void validate() const;  // throws std::invalid_argument
};

// Truncated-sine Wiener increments on the structured grid:
//   eta(x) = alpha * sum_{k,l<=K} xi_kl sin(k pi x1) sin(l pi x2)
// returned as sqrt(dt) * eta with the lumped-mass spatial mean removed.
// Increments are a pure function of (seed, realization, step).
class WienerSampler {
 public:
  WienerSampler(const Mesh& mesh, const WienerConfig& config);

  Field sample_increment(double dt, std::uint64_t seed,
                         std::uint64_t realization, std::uint64_t step) const;

 private:
  const Mesh* mesh_;
  WienerConfig config_;
  Field lumped_;
};

// Node-wise interface-localized prefactor c_noise * u (1-u) * increment.
Field apply_prefactor(const Field& u, const Field& increment, double c_noise);

// Raw truncated sine expansion sum_{k,l<=K} xi_kl sin(k pi x1) sin(l pi x2)
// at the mesh nodes, coefficients drawn from `rng` in (k, l) order.
Field sine_field_nodes(const Mesh& mesh, int n_modes, RngStream& rng);

}  // namespace acsim
