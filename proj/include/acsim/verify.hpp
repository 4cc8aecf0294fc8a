#pragma once

#include <string>
#include <vector>

#include "acsim/field.hpp"
#include "acsim/sparse.hpp"

namespace acsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Property suites behind `acsim verify`. Each check is deterministic (fixed
// internal seeds) and self-contained.
std::vector<CheckResult> verify_mesh();
std::vector<CheckResult> verify_potential();
std::vector<CheckResult> verify_wiener();
std::vector<CheckResult> verify_jump();
std::vector<CheckResult> verify_energy();
std::vector<CheckResult> verify_suite(const std::string& name);  // "all" ok

// Dense Gaussian elimination with partial pivoting; the reference solver the
// conjugate-gradient implementation is checked against.
Field dense_solve(std::vector<std::vector<double>> a, Field b);

}  // namespace acsim
