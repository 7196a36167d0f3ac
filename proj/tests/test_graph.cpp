#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "graphacl/dataset_io.hpp"
#include "graphacl/graph.hpp"
#include "graphacl/rng.hpp"
#include "oracles.hpp"

using namespace graphacl;
namespace fs = std::filesystem;

namespace {

AttributedGraph grid_features_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  Rng rng(1234 + n);
  return make_graph(n, edges, testutil::random_dense(n, 3, rng, 0.0, 1.0));
}

AttributedGraph random_graph(int n, double p, Rng& rng) {
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.emplace_back(i, j);
  return make_graph(n, edges, testutil::random_dense(n, 2, rng));
}

fs::path temp_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("graphacl_test_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("normalize_adjacency closed forms") {
  SUBCASE("single isolated node") {
    auto g = grid_features_graph(1, {});
    auto ah = normalize_adjacency(g);
    CHECK(ah.nnz() == 1);
    CHECK(ah.get(0, 0) == 1.0);
  }
  SUBCASE("two nodes, one edge: all entries 0.5") {
    auto g = grid_features_graph(2, {{0, 1}});
    auto ah = normalize_adjacency(g);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(ah.get(i, j) == 0.5);
  }
  SUBCASE("path 0-1-2") {
    auto g = grid_features_graph(3, {{0, 1}, {1, 2}});
    auto ah = normalize_adjacency(g);
    CHECK(ah.get(0, 1) == doctest::Approx(0.408248290463863).epsilon(1e-12));
    CHECK(ah.get(0, 1) == 1.0 / std::sqrt(6.0));
  }
}

TEST_CASE("normalize_adjacency invariants") {
  Rng rng(77);
  for (int t = 0; t < 10; ++t) {
    auto g = random_graph(3 + rng.uniform_int(10), 0.35, rng);
    auto ah = normalize_adjacency(g);
    ah.validate();
    for (int i = 0; i < g.n(); ++i) {
      CHECK(ah.get(i, i) == 1.0 / (g.degree(i) + 1));
      for (int p = ah.offs[i]; p < ah.offs[i + 1]; ++p) {
        const int j = ah.idx[p];
        CHECK(std::abs(ah.vals[p] - ah.get(j, i)) <= 1e-15);
        CHECK(ah.vals[p] > 0.0);
        CHECK(ah.vals[p] <= 1.0);
      }
    }
  }
}

TEST_CASE("apply_flip") {
  auto g = grid_features_graph(4, {{0, 1}, {1, 2}});
  SUBCASE("add then remove restores the original") {
    auto f1 = make_flip(0, 3, EdgeFlip::Dir::add);
    auto g2 = apply_flip(g, f1);
    CHECK(g2.adjacency.has(0, 3));
    CHECK(g2.adjacency.has(3, 0));
    auto g3 = apply_flip(g2, make_flip(0, 3, EdgeFlip::Dir::remove));
    CHECK(g3.adjacency.idx == g.adjacency.idx);
    CHECK(g3.adjacency.offs == g.adjacency.offs);
  }
  SUBCASE("add to empty 2-node graph") {
    auto e = grid_features_graph(2, {});
    auto e2 = apply_flip(e, make_flip(1, 0, EdgeFlip::Dir::add));
    CHECK(e2.adjacency.get(0, 1) == 1.0);
    CHECK(e2.adjacency.get(1, 0) == 1.0);
    CHECK(e2.adjacency.get(0, 0) == 0.0);
    CHECK(e2.adjacency.nnz() == 2);
  }
  SUBCASE("k distinct flips give distance k") {
    auto h = g;
    h = apply_flip(h, make_flip(0, 2, EdgeFlip::Dir::add));
    h = apply_flip(h, make_flip(0, 1, EdgeFlip::Dir::remove));
    h = apply_flip(h, make_flip(2, 3, EdgeFlip::Dir::add));
    CHECK(perturbation_distance(g, h) == 3);
  }
  SUBCASE("direction mismatch and self loop rejected") {
    CHECK_THROWS_AS(apply_flip(g, make_flip(0, 1, EdgeFlip::Dir::add)), std::invalid_argument);
    CHECK_THROWS_AS(apply_flip(g, make_flip(0, 3, EdgeFlip::Dir::remove)), std::invalid_argument);
    CHECK_THROWS_AS(make_flip(2, 2, EdgeFlip::Dir::add), std::invalid_argument);
  }
  SUBCASE("flip preserves symmetry, zero diagonal, 0/1 values") {
    Rng rng(5);
    auto h = random_graph(8, 0.3, rng);
    for (int t = 0; t < 20; ++t) {
      int i = rng.uniform_int(8), j = rng.uniform_int(8);
      if (i == j) continue;
      const bool present = h.adjacency.has(i, j);
      h = apply_flip(h, make_flip(i, j, present ? EdgeFlip::Dir::remove : EdgeFlip::Dir::add));
      h.validate();
    }
  }
}

TEST_CASE("perturbation_distance") {
  Rng rng(31);
  SUBCASE("identity and single flip") {
    auto g = random_graph(6, 0.4, rng);
    CHECK(perturbation_distance(g, g) == 0);
    auto h = apply_flip(g, make_flip(0, 1, g.adjacency.has(0, 1) ? EdgeFlip::Dir::remove
                                                                 : EdgeFlip::Dir::add));
    CHECK(perturbation_distance(g, h) == 1);
  }
  SUBCASE("random pair vs brute-force pair scan") {
    for (int t = 0; t < 20; ++t) {
      auto g = random_graph(6, 0.4, rng), h = random_graph(6, 0.4, rng);
      int want = 0;
      for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j)
          want += (g.adjacency.has(i, j) != h.adjacency.has(i, j));
      CHECK(perturbation_distance(g, h) == want);
    }
  }
  SUBCASE("metric properties on random triples") {
    for (int t = 0; t < 15; ++t) {
      auto a = random_graph(8, 0.3, rng), b = random_graph(8, 0.3, rng),
           c = random_graph(8, 0.3, rng);
      const int ab = perturbation_distance(a, b);
      const int ba = perturbation_distance(b, a);
      CHECK(ab == ba);
      CHECK(perturbation_distance(a, a) == 0);
      CHECK(ab <= perturbation_distance(a, c) + perturbation_distance(c, b));
      if (ab == 0) CHECK(a.adjacency.idx == b.adjacency.idx);
    }
  }
  SUBCASE("node count mismatch throws") {
    auto a = random_graph(5, 0.3, rng), b = random_graph(6, 0.3, rng);
    CHECK_THROWS_AS(perturbation_distance(a, b), std::invalid_argument);
  }
}

TEST_CASE("binarize_features") {
  Rng rng(9);
  auto g = random_graph(5, 0.4, rng);
  g.features = DenseMatrix(5, 2, {0.37, 0.0, -1.5, 2.0, 1.0, 0.0, 1e-9, 0.5, 0.0, 1.0});
  auto b = binarize_features(g);
  CHECK(b.features(0, 0) == 1.0);
  CHECK(b.features(0, 1) == 0.0);
  CHECK(b.features(1, 0) == 0.0);  // negatives map to 0
  CHECK(b.features(2, 0) == 1.0);
  auto bb = binarize_features(b);
  CHECK(bb.features.data == b.features.data);
  // already-binary matrix unchanged
  auto b3 = binarize_features(b);
  CHECK(b3.features.data == b.features.data);
}

TEST_CASE("random_edge_drop") {
  Rng rng(15);
  SUBCASE("rate 0 keeps the graph identical") {
    auto g = random_graph(10, 0.4, rng);
    auto h = random_edge_drop(g, 0.0, 99);
    CHECK(h.adjacency.idx == g.adjacency.idx);
    CHECK(h.adjacency.offs == g.adjacency.offs);
  }
  SUBCASE("drop count is binomial (4 sigma)") {
    // ~1000-edge graph
    std::vector<std::pair<int, int>> edges;
    int n = 150;
    Rng er(7);
    while (edges.size() < 1000) {
      int i = er.uniform_int(n), j = er.uniform_int(n);
      if (i != j) edges.emplace_back(std::min(i, j), std::max(i, j));
      std::sort(edges.begin(), edges.end());
      edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    }
    edges.resize(1000);
    auto g = make_graph(n, edges, DenseMatrix(n, 1));
    const double rate = 0.3;
    auto h = random_edge_drop(g, rate, 3);
    const int dropped = g.edge_count() - h.edge_count();
    const double mean = rate * 1000, sigma = std::sqrt(1000 * rate * (1 - rate));
    CHECK(std::abs(dropped - mean) <= 4 * sigma);
  }
  SUBCASE("same seed, same output") {
    auto g = random_graph(12, 0.4, rng);
    auto h1 = random_edge_drop(g, 0.5, 42), h2 = random_edge_drop(g, 0.5, 42);
    CHECK(h1.adjacency.idx == h2.adjacency.idx);
    auto h3 = random_edge_drop(g, 0.5, 43);
    CHECK(h1.adjacency.idx != h3.adjacency.idx);  // overwhelmingly likely
  }
  SUBCASE("result stays symmetric") {
    auto g = random_graph(12, 0.5, rng);
    auto h = random_edge_drop(g, 0.4, 11);
    h.validate();
  }
}

TEST_CASE("load_planetoid on the bundled fixture") {
  const std::string dir = std::string(GRAPHACL_TEST_DIR) + "/fixtures";
  auto g = load_planetoid(dir, "toy12");
  CHECK(g.n() == 12);
  CHECK(g.dim() == 4);
  CHECK(g.num_classes == 3);
  CHECK(g.edge_count() == 14);
  CHECK(g.labels[4] == 1);
  int n_train = 0, n_test = 0;
  for (int i = 0; i < 12; ++i) {
    n_train += g.train_mask[i];
    n_test += g.test_mask[i];
  }
  CHECK(n_train == 3);
  CHECK(n_test == 6);
  g.validate();
}

TEST_CASE("load_planetoid error handling and symmetrization") {
  auto dir = temp_dir("load");
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(dir / name);
    out << body;
  };
  write("meta.txt", "3 2 2 1 1 1\n");
  write("edges.txt", "0 1\n1 0\n1 2\n");  // asymmetric duplicates tolerated
  write("features.txt", "1 0\n0 1\n1 1\n");
  write("labels.txt", "0\n1\n-1\n");
  write("masks.txt", "train\nval\ntest\n");

  SUBCASE("asymmetric edge list loads symmetric") {
    auto g = load_planetoid(dir.string());
    CHECK(g.edge_count() == 2);
    CHECK(g.adjacency.get(1, 0) == 1.0);
    CHECK(g.adjacency.get(0, 1) == 1.0);
    g.validate();
  }
  SUBCASE("dangling node id reports file and line") {
    write("edges.txt", "0 1\n1 5\n");
    try {
      load_planetoid(dir.string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
      CHECK(e.file.find("edges.txt") != std::string::npos);
    }
  }
  SUBCASE("malformed feature line reports its line number") {
    write("edges.txt", "0 1\n");
    write("features.txt", "1 0\n0\n1 1\n");
    try {
      load_planetoid(dir.string());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line == 2);
    }
  }
  SUBCASE("missing file") {
    fs::remove(dir / "labels.txt");
    CHECK_THROWS_AS(load_planetoid(dir.string()), ParseError);
  }
  fs::remove_all(dir);
}

TEST_CASE("save/load round-trip") {
  Rng rng(55);
  auto g = random_graph(9, 0.35, rng);
  g.features = testutil::random_dense(9, 3, rng, 0.0, 1.0);
  for (auto& v : g.features.data) v = v > 0.5 ? 1.0 : 0.0;
  g.labels.assign(9, -1);
  g.train_mask.assign(9, 0);
  g.val_mask.assign(9, 0);
  g.test_mask.assign(9, 0);
  for (int i = 0; i < 9; ++i) {
    g.labels[i] = i % 3;
    if (i < 3) g.train_mask[i] = 1;
    else if (i < 5) g.val_mask[i] = 1;
    else g.test_mask[i] = 1;
  }
  g.num_classes = 3;
  auto dir = temp_dir("roundtrip");
  save_planetoid(g, dir.string());
  auto h = load_planetoid(dir.string());
  CHECK(h.adjacency.idx == g.adjacency.idx);
  CHECK(h.adjacency.offs == g.adjacency.offs);
  CHECK(h.features.data == g.features.data);
  CHECK(h.labels == g.labels);
  CHECK(h.train_mask == g.train_mask);
  CHECK(h.num_classes == 3);
  CHECK(dataset_checksum(dir.string()) == dataset_checksum(dir.string()));
  fs::remove_all(dir);
}

TEST_CASE("convert_linqs") {
  auto dir = temp_dir("linqs");
  {
    std::ofstream out(dir / "mini.content");
    out << "paperA 1 0 1 theory\n"
        << "paperB 0 1 0 systems\n"
        << "paperC 1 1 0 theory\n"
        << "paperD 0 0 1 systems\n";
  }
  {
    std::ofstream out(dir / "mini.cites");
    out << "paperA paperB\npaperB paperA\npaperC paperD\npaperX paperA\npaperA paperA\n";
  }
  auto stats = convert_linqs((dir / "mini.content").string(), (dir / "mini.cites").string(),
                             (dir / "out").string());
  CHECK(stats.nodes == 4);
  CHECK(stats.edges_kept == 2);  // A-B deduped, C-D; self loop and dangling skipped
  CHECK(stats.edges_dangling == 1);
  auto g = load_planetoid((dir / "out").string());
  CHECK(g.n() == 4);
  CHECK(g.dim() == 3);
  CHECK(g.num_classes == 2);
  // labels sorted alphabetically: systems=0, theory=1
  CHECK(g.labels[0] == 1);
  CHECK(g.labels[1] == 0);
  g.validate();
  fs::remove_all(dir);
}
