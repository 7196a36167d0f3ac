#pragma once

#include <stdexcept>
#include <string>

#include "graphacl/graph.hpp"

namespace graphacl {

// Parse failure in a dataset file; line is 1-based (0 = whole-file problem).
struct ParseError : std::runtime_error {
  std::string file;
  int line;
  ParseError(std::string file_, int line_, const std::string& msg);
};

// Loads the plain-text dataset format from `dir` (or `dir/name` when name is
// non-empty): meta.txt, edges.txt, features.txt, labels.txt, masks.txt.
// Edges are symmetrized and features binarized on load.
AttributedGraph load_planetoid(const std::string& dir, const std::string& name = "");

// Writes a graph in the same format; load_planetoid(save dir) round-trips.
void save_planetoid(const AttributedGraph& g, const std::string& dir);

struct ConvertStats {
  int nodes = 0;
  int edges_kept = 0;
  int edges_dangling = 0;  // citation lines referencing unknown ids
};

// Converts an LINQS-style citation dataset (<name>.content / <name>.cites,
// whitespace-separated, string node ids) into the text format above. Splits
// follow the usual transductive convention: 20 train nodes per class in file
// order, the next 500 remaining nodes for validation, the last 1000 for test.
ConvertStats convert_linqs(const std::string& content_path, const std::string& cites_path,
                           const std::string& out_dir);

// FNV-1a over the five dataset files, for run manifests.
uint64_t dataset_checksum(const std::string& dir);

}  // namespace graphacl
