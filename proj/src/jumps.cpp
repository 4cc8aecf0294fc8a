#include "acsim/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "acsim/rng.hpp"

namespace acsim {

void JumpConfig::validate() const {
  if (!(lambda_jump >= 0.0))
    throw std::invalid_argument("jumps: lambda_jump must be >= 0");
  if (!(sigma_track > 0.0))
    throw std::invalid_argument("jumps: sigma_track must be > 0");
}

JumpBatch sample_batch(const JumpConfig& config, double dt, std::uint64_t seed,
                       std::uint64_t realization, std::uint64_t step) {
  if (!(dt > 0.0)) throw std::invalid_argument("jumps: dt must be > 0");
  JumpBatch batch;
  const double mean = config.lambda_jump * dt;  // |O| = 1
  RngStream count_rng(seed, realization, step, StreamPurpose::jump_count);
  batch.count = count_rng.poisson(mean);
  batch.marks.reserve(batch.count);
  RngStream mark_rng(seed, realization, step, StreamPurpose::jump_mark);
  for (int k = 0; k < batch.count; ++k) {
    const double x = mark_rng.uniform();
    const double y = mark_rng.uniform();
    batch.marks.push_back({x, y});
  }
  return batch;
}

double track_kernel(const std::array<double, 2>& x,
                    const std::array<double, 2>& z, double sigma) {
  const double dx = x[0] - z[0];
  const double dy = x[1] - z[1];
  return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
}

double jump_amplitude(JumpAmplitude kind, double u) {
  switch (kind) {
    case JumpAmplitude::bilinear:
      return 0.5 * u * (1.0 - u);
    case JumpAmplitude::affine:
      return 0.5 * (1.0 - u);
  }
  return 0.0;
}

JumpOperator::JumpOperator(const Mesh& mesh, const JumpConfig& config)
    : mesh_(&mesh), config_(config) {
  config_.validate();
  const double sigma = config_.sigma_track;
  const double radius = 4.0 * sigma;
  const double r2 = radius * radius;
  const double h = mesh.h;
  const int n = mesh.n;

  // Midpoint quadrature of kappa(x_i; .) over cells whose center lies in the
  // truncation disc; cells outside the unit square are excluded by
  // construction, which clips the integral at the boundary.
  kernel_mass_.assign(mesh.node_count(), 0.0);
  for (int node = 0; node < mesh.node_count(); ++node) {
    const auto& x = mesh.nodes[node];
    const int ci_lo = std::max(0, static_cast<int>((x[0] - radius) / h) - 1);
    const int ci_hi = std::min(n - 1, static_cast<int>((x[0] + radius) / h) + 1);
    const int cj_lo = std::max(0, static_cast<int>((x[1] - radius) / h) - 1);
    const int cj_hi = std::min(n - 1, static_cast<int>((x[1] + radius) / h) + 1);
    double sum = 0.0;
    for (int cj = cj_lo; cj <= cj_hi; ++cj)
      for (int ci = ci_lo; ci <= ci_hi; ++ci) {
        const double cx = (ci + 0.5) * h;
        const double cy = (cj + 0.5) * h;
        const double dx = cx - x[0];
        const double dy = cy - x[1];
        const double d2 = dx * dx + dy * dy;
        if (d2 > r2) continue;
        sum += std::exp(-d2 / (2.0 * sigma * sigma));
      }
    kernel_mass_[node] = sum * h * h;
  }
}

Field JumpOperator::raw_increment(const Field& u, const JumpBatch& batch) const {
  Field out(u.size(), 0.0);
  const double sigma = config_.sigma_track;
  const double radius = 4.0 * sigma;
  const double r2 = radius * radius;
  const double h = mesh_->h;
  const int n = mesh_->n;
  for (const auto& z : batch.marks) {
    const int i_lo = std::max(0, static_cast<int>(std::ceil((z[0] - radius) / h)));
    const int i_hi = std::min(n, static_cast<int>(std::floor((z[0] + radius) / h)));
    const int j_lo = std::max(0, static_cast<int>(std::ceil((z[1] - radius) / h)));
    const int j_hi = std::min(n, static_cast<int>(std::floor((z[1] + radius) / h)));
    for (int j = j_lo; j <= j_hi; ++j)
      for (int i = i_lo; i <= i_hi; ++i) {
        const int node = mesh_->node_index(i, j);
        const auto& x = mesh_->nodes[node];
        const double dx = x[0] - z[0];
        const double dy = x[1] - z[1];
        const double d2 = dx * dx + dy * dy;
        if (d2 > r2) continue;
        out[node] += jump_amplitude(config_.amplitude, u[node]) *
                     std::exp(-d2 / (2.0 * sigma * sigma));
      }
  }
  return out;
}

Field JumpOperator::compensator_field(const Field& u, double dt) const {
  Field out(u.size(), 0.0);
  const double scale = dt * config_.lambda_jump;
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = scale * jump_amplitude(config_.amplitude, u[i]) * kernel_mass_[i];
  return out;
}

JumpOperator::Increment JumpOperator::assemble(const Field& u,
                                               const JumpBatch& batch,
                                               double dt) const {
  Increment inc;
  inc.delta_j = raw_increment(u, batch);
  inc.f2_field.assign(u.size(), 0.0);
  if (config_.compensated) {
    const Field comp = compensator_field(u, dt);
    for (std::size_t i = 0; i < u.size(); ++i) inc.delta_j[i] -= comp[i];
  } else if (config_.f2_carries_compensator) {
    const Field comp = compensator_field(u, dt);
    for (std::size_t i = 0; i < u.size(); ++i) {
      inc.delta_j[i] -= comp[i];
      inc.f2_field[i] = comp[i] / dt;
    }
  }
  return inc;
}

}  // namespace acsim
