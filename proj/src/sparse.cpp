#include "mpsfd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace mpsfd {

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto first = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i]);
  const auto last = cols.begin() + static_cast<std::ptrdiff_t>(row_ptr[i + 1]);
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return 0.0;
  return values[static_cast<std::size_t>(it - cols.begin())];
}

double SparseMatrix::diagonal(std::size_t i) const { return at(i, i); }

SparseMatrix SparseMatrix::from_rows(std::vector<std::vector<std::pair<std::size_t, double>>> rows,
                                     std::vector<Role> roles) {
  require(roles.size() == rows.size(), "one role per row required");
  SparseMatrix m;
  m.n = rows.size();
  m.roles = std::move(roles);
  m.row_ptr.assign(1, 0);
  m.row_ptr.reserve(m.n + 1);
  for (auto& row : rows) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t t = 0; t < row.size(); ++t) {
      require(row[t].first < m.n, "column index out of range");
      if (t > 0 && row[t].first == row[t - 1].first) {
        m.values.back() += row[t].second;
        continue;
      }
      m.cols.push_back(row[t].first);
      m.values.push_back(row[t].second);
    }
    m.row_ptr.push_back(m.cols.size());
  }
  return m;
}

bool SparseMatrix::approx_equal(const SparseMatrix& other, double rel_tol) const {
  if (n != other.n || row_ptr != other.row_ptr || cols != other.cols || roles != other.roles) return false;
  for (std::size_t t = 0; t < values.size(); ++t) {
    const double scale = std::max(std::abs(values[t]), std::abs(other.values[t]));
    if (std::abs(values[t] - other.values[t]) > rel_tol * scale) return false;
  }
  return true;
}

void write_matrix_market(std::ostream& out, const SparseMatrix& matrix) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << matrix.n << ' ' << matrix.n << ' ' << matrix.nnz() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < matrix.n; ++i) {
    for (std::size_t t = matrix.row_ptr[i]; t < matrix.row_ptr[i + 1]; ++t) {
      std::snprintf(buf, sizeof buf, "%.17g", matrix.values[t]);
      out << i + 1 << ' ' << matrix.cols[t] + 1 << ' ' << buf << '\n';
    }
  }
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("%%MatrixMarket matrix coordinate real general", 0) != 0)
    throw Error("not a MatrixMarket coordinate real general file");
  while (std::getline(in, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream header(line);
  std::size_t rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols >> nnz) || rows != cols) throw Error("bad MatrixMarket size line");
  std::vector<std::vector<std::pair<std::size_t, double>>> entries(rows);
  for (std::size_t t = 0; t < nnz; ++t) {
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v) || i == 0 || j == 0 || i > rows || j > rows)
      throw Error("bad MatrixMarket entry " + std::to_string(t + 1));
    entries[i - 1].emplace_back(j - 1, v);
  }
  // Roles are not part of the format; rows that are exactly the identity
  // row are tagged Dirichlet.
  std::vector<Role> roles(rows, Role::Interior);
  for (std::size_t i = 0; i < rows; ++i)
    if (entries[i].size() == 1 && entries[i][0].first == i && entries[i][0].second == 1.0) roles[i] = Role::Dirichlet;
  return SparseMatrix::from_rows(std::move(entries), std::move(roles));
}

}  // namespace mpsfd
