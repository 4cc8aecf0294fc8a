#pragma once

#include <array>
#include <vector>

#include "acsim/field.hpp"
#include "acsim/sparse.hpp"

namespace acsim {

enum class BcKind { neumann, dirichlet };

// Structured P1 triangulation of the unit square. n cells per side, h = 1/n,
// nodes ordered row-major ((x, y) = (i*h, j*h), index j*(n+1)+i), each cell
// split along its lower-left/upper-right diagonal.
struct Mesh {
  int n = 0;
  double h = 0.0;
  BcKind bc = BcKind::neumann;
  std::vector<std::array<double, 2>> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_nodes;  // ascending
  std::vector<char> is_boundary;    // per-node mask

  int node_count() const { return static_cast<int>(nodes.size()); }
  int node_index(int i, int j) const { return j * (n + 1) + i; }
};

Mesh build_mesh(int n, BcKind bc);

// Consistent P1 mass matrix.
SparseOperator assemble_mass(const Mesh& mesh);

// Row-sum (lumped) diagonal of the mass matrix.
Field lumped_mass(const Mesh& mesh);

// P1 stiffness matrix, assembled without boundary treatment (Neumann form).
SparseOperator assemble_stiffness(const Mesh& mesh);

// Symmetric Dirichlet elimination: boundary rows/columns are cleared with a
// unit diagonal, the rhs absorbs the column contributions, and boundary rhs
// entries are pinned to `values` (zero if null). Neumann meshes are left
// untouched.
void apply_bc(const Mesh& mesh, SparseOperator& op, Field& rhs,
              const Field* values = nullptr);

}  // namespace acsim
