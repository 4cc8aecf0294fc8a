#pragma once

#include <map>
#include <vector>

#include "acsim/field.hpp"

namespace acsim {

// Compressed-sparse-row symmetric operator. Immutable once built.
struct SparseOperator {
  int dim = 0;
  std::vector<int> row_ptr;  // dim+1 entries
  std::vector<int> col;
  std::vector<double> val;

  void multiply(const Field& x, Field& y) const;
  Field multiply(const Field& x) const;
  double diagonal(int i) const;
  double quadratic_form(const Field& x) const;  // x^T A x
};

// Coordinate-style accumulator; duplicate insertions add up.
class SparseBuilder {
 public:
  explicit SparseBuilder(int dim) : dim_(dim), rows_(dim) {}
  void add(int i, int j, double v) { rows_[i][j] += v; }
  SparseOperator to_csr() const;
  int dim() const { return dim_; }

 private:
  int dim_;
  std::vector<std::map<int, double>> rows_;
};

}  // namespace acsim
