#include "acsim/mesh.hpp"

#include <stdexcept>

namespace acsim {

Mesh build_mesh(int n, BcKind bc) {
  if (n < 2) throw std::invalid_argument("build_mesh: n must be >= 2");
  Mesh mesh;
  mesh.n = n;
  mesh.h = 1.0 / n;
  mesh.bc = bc;

  const int m = n + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(m) * m);
  mesh.is_boundary.assign(static_cast<std::size_t>(m) * m, 0);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      mesh.nodes.push_back({i * mesh.h, j * mesh.h});
      if (i == 0 || i == n || j == 0 || j == n) {
        mesh.is_boundary[mesh.node_index(i, j)] = 1;
        mesh.boundary_nodes.push_back(mesh.node_index(i, j));
      }
    }
  }

  // Two triangles per cell, split along the lower-left/upper-right diagonal.
  mesh.triangles.reserve(static_cast<std::size_t>(2) * n * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = mesh.node_index(i, j);
      const int b = mesh.node_index(i + 1, j);
      const int c = mesh.node_index(i + 1, j + 1);
      const int d = mesh.node_index(i, j + 1);
      mesh.triangles.push_back({a, b, c});
      mesh.triangles.push_back({a, c, d});
    }
  }
  return mesh;
}

namespace {

// Signed area and hat-function gradients of one P1 triangle.
struct TriangleGeometry {
  double area;
  std::array<std::array<double, 2>, 3> grad;
};

TriangleGeometry triangle_geometry(const Mesh& mesh,
                                   const std::array<int, 3>& tri) {
  const auto& p0 = mesh.nodes[tri[0]];
  const auto& p1 = mesh.nodes[tri[1]];
  const auto& p2 = mesh.nodes[tri[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) -
                     (p2[0] - p0[0]) * (p1[1] - p0[1]);
  TriangleGeometry g;
  g.area = 0.5 * det;
  g.grad[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
  g.grad[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
  g.grad[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
  return g;
}

}  // namespace

SparseOperator assemble_mass(const Mesh& mesh) {
  SparseBuilder builder(mesh.node_count());
  for (const auto& tri : mesh.triangles) {
    const double area = triangle_geometry(mesh, tri).area;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        builder.add(tri[a], tri[b], area / 12.0 * (a == b ? 2.0 : 1.0));
  }
  return builder.to_csr();
}

Field lumped_mass(const Mesh& mesh) {
  Field diag(mesh.node_count(), 0.0);
  for (const auto& tri : mesh.triangles) {
    const double area = triangle_geometry(mesh, tri).area;
    for (int a = 0; a < 3; ++a) diag[tri[a]] += area / 3.0;
  }
  return diag;
}

SparseOperator assemble_stiffness(const Mesh& mesh) {
  SparseBuilder builder(mesh.node_count());
  for (const auto& tri : mesh.triangles) {
    const auto g = triangle_geometry(mesh, tri);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        builder.add(tri[a], tri[b],
                    g.area * (g.grad[a][0] * g.grad[b][0] +
                              g.grad[a][1] * g.grad[b][1]));
  }
  return builder.to_csr();
}

void apply_bc(const Mesh& mesh, SparseOperator& op, Field& rhs,
              const Field* values) {
  if (mesh.bc == BcKind::neumann) return;

  // Move known boundary columns to the rhs, then clear rows/columns.
  for (int i = 0; i < op.dim; ++i) {
    if (mesh.is_boundary[i]) continue;
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k) {
      const int j = op.col[k];
      if (mesh.is_boundary[j]) {
        rhs[i] -= op.val[k] * (values ? (*values)[j] : 0.0);
        op.val[k] = 0.0;
      }
    }
  }
  for (int i = 0; i < op.dim; ++i) {
    if (!mesh.is_boundary[i]) continue;
    for (int k = op.row_ptr[i]; k < op.row_ptr[i + 1]; ++k)
      op.val[k] = (op.col[k] == i) ? 1.0 : 0.0;
    rhs[i] = values ? (*values)[i] : 0.0;
  }
}

}  // namespace acsim
