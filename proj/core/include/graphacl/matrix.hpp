#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace graphacl {

namespace detail {
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}
}  // namespace detail

// Row-major dense matrix of doubles.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {
    detail::require(r >= 0 && c >= 0, "DenseMatrix: negative dimensions");
  }
  DenseMatrix(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    detail::require(r >= 0 && c >= 0, "DenseMatrix: negative dimensions");
    detail::require(data.size() == static_cast<size_t>(r) * c,
                    "DenseMatrix: data length does not match rows*cols");
  }

  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }

  bool same_shape(const DenseMatrix& o) const { return rows == o.rows && cols == o.cols; }

  bool is_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

// Compressed sparse row matrix of doubles. Column indices are strictly
// increasing within each row.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> offs;  // length rows+1
  std::vector<int> idx;   // length nnz
  std::vector<double> vals;
  bool symmetric_hint = false;

  SparseMatrix() : offs(1, 0) {}
  SparseMatrix(int r, int c) : rows(r), cols(c), offs(static_cast<size_t>(r) + 1, 0) {
    detail::require(r >= 0 && c >= 0, "SparseMatrix: negative dimensions");
  }

  int nnz() const { return static_cast<int>(idx.size()); }

  static SparseMatrix identity(int n);

  // Builds from (row, col, value) triples; entries may arrive in any order.
  // Duplicate coordinates are an error.
  static SparseMatrix from_coo(int rows, int cols,
                               std::vector<std::pair<std::pair<int, int>, double>> entries,
                               bool symmetric_hint = false);

  double get(int i, int j) const;          // 0.0 when absent
  bool has(int i, int j) const;

  // Throws std::invalid_argument when the CSR structure is malformed or the
  // symmetric hint does not hold.
  void validate() const;
};

}  // namespace graphacl
