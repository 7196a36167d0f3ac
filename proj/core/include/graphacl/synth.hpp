#pragma once

#include <string>

#include "graphacl/graph.hpp"

namespace graphacl {

// Recipe for a synthetic citation-style benchmark: binary bag-of-words
// features drawn from per-class topic blocks, homophilous preferential-
// attachment structure, and planetoid-convention splits.
struct SynthSpec {
  std::string name;
  int nodes = 0;
  int dim = 0;
  int classes = 0;
  int target_edges = 0;  // undirected; the result lands within a few percent
  int train_per_class = 20;
  int val_count = 500;
  int test_count = 1000;
  double homophily = 0.8;     // fraction of edges forced intra-class
  double topic_purity = 0.7;  // fraction of a node's words from its own topic
  int words_per_node = 18;
  uint64_t seed = 0;

  void validate() const;
};

// Deterministic in the spec (including its seed). Labels, features, edges,
// and masks are all populated; features are binary.
AttributedGraph synth_planetoid(const SynthSpec& spec);

// Cora-shaped: 2708 nodes, 1433 features, 7 classes, ~5278 edges, 140/500/1000.
SynthSpec cora_like();
// Citeseer-shaped: 3327 nodes, 3703 features, 6 classes, ~4552 edges, 120/500/1000.
SynthSpec citeseer_like();

}  // namespace graphacl
