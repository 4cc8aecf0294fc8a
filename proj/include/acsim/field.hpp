#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace acsim {

// Nodal coefficient vector, one value per mesh node.
using Field = std::vector<double>;

inline double field_min(const Field& u) {
  return *std::min_element(u.begin(), u.end());
}

inline double field_max(const Field& u) {
  return *std::max_element(u.begin(), u.end());
}

// Lumped-mass quadrature of u over the domain.
inline double lumped_integral(const Field& lumped_mass, const Field& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += lumped_mass[i] * u[i];
  return s;
}

// Lumped approximation of the squared L2 norm.
inline double lumped_sq_norm(const Field& lumped_mass, const Field& u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += lumped_mass[i] * u[i] * u[i];
  return s;
}

inline double lumped_sq_distance(const Field& lumped_mass, const Field& a,
                                 const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += lumped_mass[i] * d * d;
  }
  return s;
}

inline double inf_norm(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace acsim
