#include "graphacl/graph.hpp"

#include <algorithm>
#include <cmath>

#include "graphacl/rng.hpp"

namespace graphacl {

void AttributedGraph::validate() const {
  adjacency.validate();
  detail::require(adjacency.rows == adjacency.cols, "graph: adjacency must be square");
  detail::require(features.rows == adjacency.rows, "graph: features row count != node count");
  const int n = adjacency.rows;
  for (int i = 0; i < n; ++i) {
    for (int p = adjacency.offs[i]; p < adjacency.offs[i + 1]; ++p) {
      detail::require(adjacency.idx[p] != i, "graph: self loop present");
      detail::require(adjacency.vals[p] == 1.0, "graph: adjacency value not 1.0");
      detail::require(adjacency.get(adjacency.idx[p], i) == 1.0, "graph: adjacency not symmetric");
    }
  }
  if (!labels.empty())
    detail::require(labels.size() == static_cast<size_t>(n), "graph: labels length != node count");
  for (const auto* m : {&train_mask, &val_mask, &test_mask})
    if (!m->empty())
      detail::require(m->size() == static_cast<size_t>(n), "graph: mask length != node count");
  if (!train_mask.empty() && !val_mask.empty() && !test_mask.empty()) {
    for (int i = 0; i < n; ++i)
      detail::require(train_mask[i] + val_mask[i] + test_mask[i] <= 1,
                      "graph: masks overlap");
  }
  if (!labels.empty() && !train_mask.empty()) {
    for (int i = 0; i < n; ++i)
      if (train_mask[i])
        detail::require(labels[i] >= 0, "graph: train node missing label");
  }
  for (int l : labels)
    detail::require(l >= -1 && l < std::max(num_classes, 1),
                    "graph: label out of range");
}

AttributedGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                           DenseMatrix features) {
  detail::require(features.rows == n, "make_graph: features row count != n");
  std::vector<std::pair<int, int>> canon;
  canon.reserve(edges.size());
  for (auto [i, j] : edges) {
    detail::require(i >= 0 && i < n && j >= 0 && j < n, "make_graph: endpoint out of range");
    detail::require(i != j, "make_graph: self loop");
    canon.emplace_back(std::min(i, j), std::max(i, j));
  }
  std::sort(canon.begin(), canon.end());
  canon.erase(std::unique(canon.begin(), canon.end()), canon.end());
  std::vector<std::pair<std::pair<int, int>, double>> entries;
  entries.reserve(canon.size() * 2);
  for (auto [i, j] : canon) {
    entries.push_back({{i, j}, 1.0});
    entries.push_back({{j, i}, 1.0});
  }
  AttributedGraph g;
  g.adjacency = SparseMatrix::from_coo(n, n, std::move(entries), /*symmetric_hint=*/true);
  g.features = std::move(features);
  return g;
}

EdgeFlip make_flip(int i, int j, EdgeFlip::Dir direction) {
  detail::require(i != j, "make_flip: endpoints must differ");
  EdgeFlip f;
  f.i = std::min(i, j);
  f.j = std::max(i, j);
  f.direction = direction;
  return f;
}

SparseMatrix normalize_adjacency(const AttributedGraph& g) {
  const int n = g.n();
  SparseMatrix out(n, n);
  out.symmetric_hint = true;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = static_cast<double>(g.degree(i) + 1);
  out.idx.reserve(g.adjacency.nnz() + n);
  out.vals.reserve(g.adjacency.nnz() + n);
  for (int i = 0; i < n; ++i) {
    bool diag_done = false;
    for (int p = g.adjacency.offs[i]; p < g.adjacency.offs[i + 1]; ++p) {
      const int j = g.adjacency.idx[p];
      if (!diag_done && j > i) {
        out.idx.push_back(i);
        out.vals.push_back(1.0 / d[i]);
        diag_done = true;
      }
      out.idx.push_back(j);
      out.vals.push_back(1.0 / std::sqrt(d[i] * d[j]));
    }
    if (!diag_done) {
      out.idx.push_back(i);
      out.vals.push_back(1.0 / d[i]);
    }
    out.offs[i + 1] = static_cast<int>(out.idx.size());
  }
  return out;
}

SparseMatrix toggle_pair(const SparseMatrix& a, int i, int j) {
  detail::require(i != j, "toggle_pair: endpoints must differ");
  SparseMatrix out(a.rows, a.cols);
  out.symmetric_hint = a.symmetric_hint;
  const bool present = a.has(i, j);
  out.idx.reserve(a.nnz() + 2);
  out.vals.reserve(a.nnz() + 2);
  for (int r = 0; r < a.rows; ++r) {
    const int other = r == i ? j : (r == j ? i : -1);
    bool inserted = other < 0 || present;  // nothing to insert in this row
    for (int p = a.offs[r]; p < a.offs[r + 1]; ++p) {
      const int c = a.idx[p];
      if (present && other >= 0 && c == other) continue;  // drop the edge
      if (!inserted && c > other) {
        out.idx.push_back(other);
        out.vals.push_back(1.0);
        inserted = true;
      }
      out.idx.push_back(c);
      out.vals.push_back(a.vals[p]);
    }
    if (!inserted) {
      out.idx.push_back(other);
      out.vals.push_back(1.0);
    }
    out.offs[r + 1] = static_cast<int>(out.idx.size());
  }
  return out;
}

AttributedGraph apply_flip(const AttributedGraph& g, const EdgeFlip& f) {
  detail::require(f.i >= 0 && f.j < g.n() && f.i < f.j, "apply_flip: invalid flip endpoints");
  const bool present = g.adjacency.has(f.i, f.j);
  if (f.direction == EdgeFlip::Dir::add)
    detail::require(!present, "apply_flip: edge already present");
  else
    detail::require(present, "apply_flip: edge absent");
  AttributedGraph out = g;
  out.adjacency = toggle_pair(g.adjacency, f.i, f.j);
  return out;
}

int perturbation_distance(const AttributedGraph& g, const AttributedGraph& h) {
  detail::require(g.n() == h.n(), "perturbation_distance: node count mismatch");
  int diff = 0;
  for (int i = 0; i < g.n(); ++i) {
    int p = g.adjacency.offs[i], pe = g.adjacency.offs[i + 1];
    int q = h.adjacency.offs[i], qe = h.adjacency.offs[i + 1];
    while (p < pe || q < qe) {
      const int cg = p < pe ? g.adjacency.idx[p] : g.n();
      const int ch = q < qe ? h.adjacency.idx[q] : h.n();
      if (cg == ch) {
        ++p;
        ++q;
      } else if (cg < ch) {
        diff += cg > i;
        ++p;
      } else {
        diff += ch > i;
        ++q;
      }
    }
  }
  return diff;
}

AttributedGraph binarize_features(const AttributedGraph& g) {
  AttributedGraph out = g;
  for (auto& v : out.features.data) v = v > 0.0 ? 1.0 : 0.0;
  return out;
}

AttributedGraph random_edge_drop(const AttributedGraph& g, double rate, uint64_t seed) {
  detail::require(rate >= 0.0 && rate < 1.0, "random_edge_drop: rate must be in [0,1)");
  Rng rng(seed);
  std::vector<std::pair<int, int>> kept;
  for (auto e : undirected_edges(g)) {
    const bool drop = rng.uniform() < rate;
    if (!drop) kept.push_back(e);
  }
  AttributedGraph out = make_graph(g.n(), kept, g.features);
  out.labels = g.labels;
  out.train_mask = g.train_mask;
  out.val_mask = g.val_mask;
  out.test_mask = g.test_mask;
  out.num_classes = g.num_classes;
  return out;
}

std::vector<std::pair<int, int>> undirected_edges(const AttributedGraph& g) {
  std::vector<std::pair<int, int>> out;
  out.reserve(g.edge_count());
  for (int i = 0; i < g.n(); ++i)
    for (int p = g.adjacency.offs[i]; p < g.adjacency.offs[i + 1]; ++p)
      if (g.adjacency.idx[p] > i) out.emplace_back(i, g.adjacency.idx[p]);
  return out;
}

}  // namespace graphacl
