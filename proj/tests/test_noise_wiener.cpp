#include <doctest.h>

#include <cmath>

#include "acsim/wiener.hpp"

using namespace acsim;

TEST_CASE("increment mean removal is exact in the lumped inner product") {
  const Mesh mesh = build_mesh(16, BcKind::neumann);
  const Field lumped = lumped_mass(mesh);
  const WienerSampler sampler(mesh, WienerConfig{});
  for (int step = 0; step < 200; ++step) {
    const Field inc = sampler.sample_increment(0.05, 1, 0, step);
    CHECK(std::abs(lumped_integral(lumped, inc)) <= 1e-12);
  }
}

TEST_CASE("nodal increments are zero-mean with Brownian variance scaling") {
  const Mesh mesh = build_mesh(16, BcKind::neumann);
  const WienerSampler sampler(mesh, WienerConfig{});
  const int node = mesh.node_index(5, 9);
  const int samples = 10000;

  double sum = 0.0, sum_sq = 0.0;
  for (int step = 0; step < samples; ++step) {
    const double v = sampler.sample_increment(1.0, 2, 0, step)[node];
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / samples;
  const double var = sum_sq / samples - mean * mean;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(var / samples));

  double sum_sq_small = 0.0, sum_small = 0.0;
  for (int step = 0; step < samples; ++step) {
    const double v = sampler.sample_increment(0.05, 3, 0, step)[node];
    sum_small += v;
    sum_sq_small += v * v;
  }
  const double mean_small = sum_small / samples;
  const double var_small = sum_sq_small / samples - mean_small * mean_small;
  CHECK(var_small / var == doctest::Approx(0.05).epsilon(0.05));
}

TEST_CASE("increments are reproducible and independent across steps") {
  const Mesh mesh = build_mesh(8, BcKind::neumann);
  const WienerSampler sampler(mesh, WienerConfig{});

  const Field a = sampler.sample_increment(0.05, 17, 3, 128);
  const Field b = sampler.sample_increment(0.05, 17, 3, 128);
  CHECK(a == b);  // bit identical

  const Field c = sampler.sample_increment(0.05, 17, 3, 129);
  CHECK(a != c);
  const Field d = sampler.sample_increment(0.05, 17, 4, 128);
  CHECK(a != d);

  // lag-1 autocorrelation of a nodal series
  const int node = mesh.node_index(3, 5);
  const int samples = 10000;
  std::vector<double> series(samples);
  for (int step = 0; step < samples; ++step)
    series[step] = sampler.sample_increment(0.05, 18, 0, step)[node];
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= samples;
  double c0 = 0.0, c1 = 0.0;
  for (int k = 0; k < samples; ++k) {
    c0 += (series[k] - mean) * (series[k] - mean);
    if (k + 1 < samples) c1 += (series[k] - mean) * (series[k + 1] - mean);
  }
  CHECK(std::abs(c1 / c0) <= 3.0 / std::sqrt(samples));
}

TEST_CASE("multiplicative prefactor") {
  const int n = 25;
  const Field inc(n, 2.0);

  CHECK(inf_norm(apply_prefactor(Field(n, 0.0), inc, 0.5)) == 0.0);
  CHECK(inf_norm(apply_prefactor(Field(n, 1.0), inc, 0.5)) == 0.0);
  CHECK(inf_norm(apply_prefactor(Field(n, 0.3), inc, 0.0)) == 0.0);

  // u = 1/2, c = 1/2: G(u) = 1/8
  const Field mid = apply_prefactor(Field(n, 0.5), inc, 0.5);
  for (double v : mid) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  CHECK_THROWS_AS(apply_prefactor(Field(n, 0.5), Field(n + 1, 0.0), 0.5),
                  std::invalid_argument);

  // Lipschitz surrogate |G(a) - G(b)| <= c_noise |a - b| on [0, 1]
  RngStream rng(19, 0, 0, StreamPurpose::init_field);
  for (int k = 0; k < 10000; ++k) {
    const double a = rng.uniform();
    const double b = rng.uniform();
    const double ga = 0.5 * a * (1.0 - a);
    const double gb = 0.5 * b * (1.0 - b);
    CHECK(std::abs(ga - gb) <= 0.5 * std::abs(a - b) + 1e-15);
  }
}

TEST_CASE("config validation") {
  WienerConfig config;
  config.c_noise = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = WienerConfig{};
  config.n_modes = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  const Mesh mesh = build_mesh(4, BcKind::neumann);
  const WienerSampler sampler(mesh, WienerConfig{});
  CHECK_THROWS_AS(sampler.sample_increment(0.0, 1, 0, 0),
                  std::invalid_argument);
}
