#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "graphacl/matrix.hpp"

namespace graphacl {

// G = (A, X): symmetric 0/1 adjacency with zero diagonal plus dense node
// features, with optional labels (-1 = unlabeled) and split masks.
struct AttributedGraph {
  SparseMatrix adjacency;
  DenseMatrix features;
  std::vector<int> labels;  // empty, or length N
  std::vector<uint8_t> train_mask, val_mask, test_mask;  // empty, or length N
  int num_classes = 0;

  int n() const { return adjacency.rows; }
  int dim() const { return features.cols; }
  int degree(int i) const { return adjacency.offs[i + 1] - adjacency.offs[i]; }
  int edge_count() const { return adjacency.nnz() / 2; }
  bool has_labels() const { return !labels.empty(); }
  bool has_masks() const { return !train_mask.empty(); }

  // Checks every structural invariant; throws std::invalid_argument.
  void validate() const;
};

// Builds a graph from undirected edges (self loops rejected, duplicates and
// both orientations tolerated).
AttributedGraph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                           DenseMatrix features);

struct EdgeFlip {
  enum class Dir { add, remove };
  int i = 0;
  int j = 0;  // canonical order i < j
  Dir direction = Dir::add;
};

// Canonicalizes endpoint order; i == j is rejected.
EdgeFlip make_flip(int i, int j, EdgeFlip::Dir direction);

struct PerturbationBudget {
  enum class Policy { all_pairs, incident_to_targets };
  int max_flips = 0;
  Policy policy = Policy::all_pairs;
  int min_degree_floor = 1;
  std::vector<int> targets;  // consulted by incident_to_targets only
};

// A-hat = D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
// Diagonal entries are exactly 1/(deg(i)+1).
SparseMatrix normalize_adjacency(const AttributedGraph& g);

// Toggles the pair (i,j)/(j,i); the flip direction must match the current
// state. Returns a new graph.
AttributedGraph apply_flip(const AttributedGraph& g, const EdgeFlip& f);

// Number of unordered node pairs whose adjacency differs.
int perturbation_distance(const AttributedGraph& g, const AttributedGraph& h);

// Maps every feature entry to 1.0 if > 0 else 0.0.
AttributedGraph binarize_features(const AttributedGraph& g);

// Removes each undirected edge independently with probability `rate` under a
// seeded generator.
AttributedGraph random_edge_drop(const AttributedGraph& g, double rate, uint64_t seed);

// Undirected edge list, (i, j) with i < j, ascending.
std::vector<std::pair<int, int>> undirected_edges(const AttributedGraph& g);

// Adjacency with one pair toggled; used by apply_flip and the attack loops.
SparseMatrix toggle_pair(const SparseMatrix& a, int i, int j);

}  // namespace graphacl
