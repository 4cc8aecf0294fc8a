#include "acsim/wiener.hpp"

#include <cmath>
#include <stdexcept>

namespace acsim {

void WienerConfig::validate() const {
  if (!(c_noise >= 0.0))
    throw std::invalid_argument("wiener: c_noise must be >= 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("wiener: alpha must be > 0");
  if (n_modes < 1) throw std::invalid_argument("wiener: n_modes must be >= 1");
}

Field sine_field_nodes(const Mesh& mesh, int n_modes, RngStream& rng) {
  const double pi = 3.14159265358979323846;
  const int m = mesh.n + 1;
  std::vector<std::vector<double>> sine(n_modes, std::vector<double>(m));
  for (int k = 0; k < n_modes; ++k)
    for (int i = 0; i < m; ++i) sine[k][i] = std::sin((k + 1) * pi * i * mesh.h);

  std::vector<double> xi(static_cast<std::size_t>(n_modes) * n_modes);
  for (auto& v : xi) v = rng.gaussian();

  // Separable evaluation: partial[k][j] = sum_l xi_kl sin(l pi y_j).
  std::vector<double> partial(static_cast<std::size_t>(n_modes) * m, 0.0);
  for (int k = 0; k < n_modes; ++k)
    for (int l = 0; l < n_modes; ++l) {
      const double w = xi[static_cast<std::size_t>(k) * n_modes + l];
      double* row = partial.data() + static_cast<std::size_t>(k) * m;
      for (int j = 0; j < m; ++j) row[j] += w * sine[l][j];
    }

  Field out(mesh.node_count(), 0.0);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int k = 0; k < n_modes; ++k)
        s += sine[k][i] * partial[static_cast<std::size_t>(k) * m + j];
      out[mesh.node_index(i, j)] = s;
    }
  return out;
}

WienerSampler::WienerSampler(const Mesh& mesh, const WienerConfig& config)
    : mesh_(&mesh), config_(config), lumped_(lumped_mass(mesh)) {
  config_.validate();
}

Field WienerSampler::sample_increment(double dt, std::uint64_t seed,
                                      std::uint64_t realization,
                                      std::uint64_t step) const {
  if (!(dt > 0.0)) throw std::invalid_argument("wiener: dt must be > 0");
  RngStream rng(seed, realization, step, StreamPurpose::wiener);
  Field inc = sine_field_nodes(*mesh_, config_.n_modes, rng);

  const double scale = config_.alpha * std::sqrt(dt);
  for (auto& v : inc) v *= scale;

  // Remove the discrete spatial mean (lumped masses sum to |O| = 1).
  double mass = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < inc.size(); ++i) {
    mass += lumped_[i];
    mean += lumped_[i] * inc[i];
  }
  mean /= mass;
  for (auto& v : inc) v -= mean;
  return inc;
}

Field apply_prefactor(const Field& u, const Field& increment, double c_noise) {
  if (u.size() != increment.size())
    throw std::invalid_argument("apply_prefactor: field length mismatch");
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = c_noise * u[i] * (1.0 - u[i]) * increment[i];
  return out;
}

}  // namespace acsim
