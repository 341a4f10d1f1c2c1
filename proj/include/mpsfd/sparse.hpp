#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "mpsfd/common.hpp"

namespace mpsfd {

/// Square CSR matrix with a role tag per row. Column indices are strictly
/// increasing within each row.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> values;
  std::vector<Role> roles;

  std::size_t nnz() const { return values.size(); }
  std::size_t row_size(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
  double diagonal(std::size_t i) const;
  double at(std::size_t i, std::size_t j) const;

  /// Builds from unsorted (column, value) lists per row; duplicate columns
  /// are summed and exact zeros are kept.
  static SparseMatrix from_rows(std::vector<std::vector<std::pair<std::size_t, double>>> rows, std::vector<Role> roles);

  /// Same structure and values within rel_tol relative to the largest
  /// magnitude of the two entries.
  bool approx_equal(const SparseMatrix& other, double rel_tol = 1e-12) const;
};

/// "%%MatrixMarket matrix coordinate real general", 1-based indices.
void write_matrix_market(std::ostream& out, const SparseMatrix& matrix);
SparseMatrix read_matrix_market(std::istream& in);

}  // namespace mpsfd
