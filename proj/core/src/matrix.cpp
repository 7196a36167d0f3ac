#include "graphacl/matrix.hpp"

#include <algorithm>

namespace graphacl {

SparseMatrix SparseMatrix::identity(int n) {
  SparseMatrix m(n, n);
  m.idx.resize(n);
  m.vals.assign(n, 1.0);
  for (int i = 0; i < n; ++i) {
    m.idx[i] = i;
    m.offs[i + 1] = i + 1;
  }
  m.symmetric_hint = true;
  return m;
}

SparseMatrix SparseMatrix::from_coo(int rows, int cols,
                                    std::vector<std::pair<std::pair<int, int>, double>> entries,
                                    bool symmetric_hint) {
  SparseMatrix m(rows, cols);
  for (const auto& e : entries) {
    detail::require(e.first.first >= 0 && e.first.first < rows && e.first.second >= 0 &&
                        e.first.second < cols,
                    "SparseMatrix::from_coo: coordinate out of bounds");
  }
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 1; i < entries.size(); ++i)
    detail::require(entries[i].first != entries[i - 1].first,
                    "SparseMatrix::from_coo: duplicate coordinate");
  m.idx.reserve(entries.size());
  m.vals.reserve(entries.size());
  size_t at = 0;
  for (int r = 0; r < rows; ++r) {
    while (at < entries.size() && entries[at].first.first == r) {
      m.idx.push_back(entries[at].first.second);
      m.vals.push_back(entries[at].second);
      ++at;
    }
    m.offs[r + 1] = static_cast<int>(m.idx.size());
  }
  m.symmetric_hint = symmetric_hint;
  if (symmetric_hint) m.validate();
  return m;
}

double SparseMatrix::get(int i, int j) const {
  const int lo = offs[i], hi = offs[i + 1];
  auto it = std::lower_bound(idx.begin() + lo, idx.begin() + hi, j);
  if (it != idx.begin() + hi && *it == j) return vals[it - idx.begin()];
  return 0.0;
}

bool SparseMatrix::has(int i, int j) const {
  const int lo = offs[i], hi = offs[i + 1];
  return std::binary_search(idx.begin() + lo, idx.begin() + hi, j);
}

void SparseMatrix::validate() const {
  detail::require(offs.size() == static_cast<size_t>(rows) + 1,
                  "SparseMatrix: offsets length must be rows+1");
  detail::require(offs.front() == 0 && offs.back() == nnz(),
                  "SparseMatrix: offset endpoints malformed");
  for (int r = 0; r < rows; ++r) {
    detail::require(offs[r] <= offs[r + 1], "SparseMatrix: offsets not monotone");
    for (int p = offs[r]; p < offs[r + 1]; ++p) {
      detail::require(idx[p] >= 0 && idx[p] < cols, "SparseMatrix: column index out of bounds");
      if (p > offs[r])
        detail::require(idx[p] > idx[p - 1],
                        "SparseMatrix: column indices not strictly increasing in row");
    }
  }
  if (symmetric_hint) {
    detail::require(rows == cols, "SparseMatrix: symmetric matrix must be square");
    for (int r = 0; r < rows; ++r)
      for (int p = offs[r]; p < offs[r + 1]; ++p)
        detail::require(get(idx[p], r) == vals[p],
                        "SparseMatrix: symmetric hint violated");
  }
}

}  // namespace graphacl
