#include "acsim/sparse.hpp"

namespace acsim {

void SparseOperator::multiply(const Field& x, Field& y) const {
  y.assign(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    double s = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

Field SparseOperator::multiply(const Field& x) const {
  Field y;
  multiply(x, y);
  return y;
}

double SparseOperator::diagonal(int i) const {
  for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
    if (col[k] == i) return val[k];
  return 0.0;
}

double SparseOperator::quadratic_form(const Field& x) const {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    double row = 0.0;
    for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) row += val[k] * x[col[k]];
    s += x[i] * row;
  }
  return s;
}

SparseOperator SparseBuilder::to_csr() const {
  SparseOperator op;
  op.dim = dim_;
  op.row_ptr.reserve(dim_ + 1);
  op.row_ptr.push_back(0);
  for (const auto& row : rows_) {
    for (const auto& [j, v] : row) {
      op.col.push_back(j);
      op.val.push_back(v);
    }
    op.row_ptr.push_back(static_cast<int>(op.col.size()));
  }
  return op;
}

}  // namespace acsim
