#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <utility>
#include <vector>

#include "doctest.h"
#include "graphacl/attack.hpp"
#include "graphacl/dataset_io.hpp"
#include "oracles.hpp"

using namespace graphacl;

namespace {

AttributedGraph toy_labeled(int n, int d, int k, uint64_t seed, double edge_p = 0.4,
                            bool binary_features = false) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_p) edges.push_back({i, j});
  if (edges.empty()) edges.push_back({0, 1});
  DenseMatrix x = testutil::random_dense(n, d, rng, 0.0, 1.0);
  if (binary_features)
    for (double& v : x.data) v = v > 0.5 ? 1.0 : 0.0;
  AttributedGraph g = make_graph(n, edges, std::move(x));
  g.num_classes = k;
  g.labels.resize(n);
  for (int i = 0; i < n; ++i) g.labels[i] = rng.uniform_int(k);
  g.train_mask.assign(n, 1);
  g.val_mask.assign(n, 0);
  g.test_mask.assign(n, 0);
  return g;
}

// Long-double dense re-evaluation of the surrogate cross-entropy.
double oracle_ce(const AttributedGraph& g, const DenseMatrix& w, int hops,
                 const std::vector<int>& labels, const std::vector<uint8_t>& mask) {
  const DenseMatrix ah = testutil::dense_normalize(testutil::densify(g.adjacency));
  DenseMatrix m = testutil::naive_matmul(g.features, w);
  for (int t = 0; t < hops; ++t) m = testutil::naive_matmul(ah, m);
  long double acc = 0.0;
  int cnt = 0;
  for (int i = 0; i < m.rows; ++i) {
    if (!mask[i]) continue;
    long double mx = m(i, 0);
    for (int c = 1; c < m.cols; ++c) mx = std::max<long double>(mx, m(i, c));
    long double sum = 0.0;
    for (int c = 0; c < m.cols; ++c) sum += std::exp(static_cast<long double>(m(i, c)) - mx);
    acc -= static_cast<long double>(m(i, labels[i])) - mx - std::log(sum);
    ++cnt;
  }
  return static_cast<double>(acc / cnt);
}

// Dense-path margin of `target` (used against the attack's CSR local logits).
double oracle_margin(const AttributedGraph& g, const DenseMatrix& w, int hops, int target) {
  const DenseMatrix ah = testutil::dense_normalize(testutil::densify(g.adjacency));
  DenseMatrix m = testutil::naive_matmul(g.features, w);
  for (int t = 0; t < hops; ++t) m = testutil::naive_matmul(ah, m);
  const int y = g.labels[target];
  double best_other = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < m.cols; ++c)
    if (c != y) best_other = std::max(best_other, m(target, c));
  return m(target, y) - best_other;
}

// The factored dL/dA-hat of the surrogate CE, matching the documented
// factorization logits = A-hat^H (X W).
AhatFactors ce_factors(const AttributedGraph& g, const SparseMatrix& a_hat,
                       const SurrogateModel& s, const std::vector<int>& labels,
                       const std::vector<uint8_t>& mask) {
  std::vector<DenseMatrix> powers;
  powers.push_back(matmul(g.features, s.weight));
  for (int t = 1; t < s.hops; ++t) powers.push_back(spmm(a_hat, powers.back()));
  const DenseMatrix probs = softmax_rows(spmm(a_hat, powers.back()));
  DenseMatrix dlogits;
  cross_entropy(probs, labels, mask, &dlogits);
  AhatFactors f;
  f.du.push_back(std::move(dlogits));
  for (int t = 1; t < s.hops; ++t) f.du.push_back(spmm(a_hat, f.du.back()));
  for (int t = 0; t < s.hops; ++t) f.p.push_back(std::move(powers[s.hops - 1 - t]));
  return f;
}

std::vector<std::pair<int, int>> all_pairs(int n) {
  std::vector<std::pair<int, int>> ps;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) ps.push_back({i, j});
  return ps;
}

EdgeFlip toggle_of(const AttributedGraph& g, int i, int j) {
  return make_flip(i, j, g.adjacency.has(i, j) ? EdgeFlip::Dir::remove : EdgeFlip::Dir::add);
}

bool same_adjacency(const SparseMatrix& a, const SparseMatrix& b) {
  return a.offs == b.offs && a.idx == b.idx && a.vals == b.vals;
}

void check_result_invariants(const AttributedGraph& g, const PerturbationBudget& budget,
                             const AttackResult& r) {
  CHECK(static_cast<int>(r.flips.size()) <= budget.max_flips);
  CHECK(perturbation_distance(g, r.perturbed) == static_cast<int>(r.flips.size()));
  r.perturbed.validate();
  for (size_t t = 1; t < r.loss_trace.size(); ++t)
    CHECK(r.loss_trace[t] >= r.loss_trace[t - 1]);
  for (const EdgeFlip& f : r.flips)
    if (f.direction == EdgeFlip::Dir::remove) {
      CHECK(r.perturbed.degree(f.i) >= budget.min_degree_floor);
      CHECK(r.perturbed.degree(f.j) >= budget.min_degree_floor);
    }
}

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("cross_entropy pinned values") {
  DenseMatrix uniform(3, 7);
  for (double& v : uniform.data) v = 1.0 / 7.0;
  const std::vector<int> labels{0, 3, 6};
  const std::vector<uint8_t> mask{1, 1, 1};
  CHECK(cross_entropy(uniform, labels, mask) ==
        doctest::Approx(1.9459101490553133).epsilon(1e-14));

  DenseMatrix onehot(4, 4);
  std::vector<int> diag(4);
  for (int i = 0; i < 4; ++i) {
    onehot(i, i) = 1.0;
    diag[i] = i;
  }
  CHECK(cross_entropy(onehot, diag, std::vector<uint8_t>(4, 1)) == 0.0);
}

TEST_CASE("cross_entropy rejects malformed input") {
  DenseMatrix uniform(3, 4);
  for (double& v : uniform.data) v = 0.25;
  const std::vector<int> labels{0, 1, 2};
  CHECK_THROWS_AS(cross_entropy(uniform, labels, std::vector<uint8_t>(3, 0)),
                  std::invalid_argument);  // empty mask
  CHECK_THROWS_AS(cross_entropy(uniform, labels, std::vector<uint8_t>(2, 1)),
                  std::invalid_argument);  // length mismatch
  CHECK_THROWS_AS(cross_entropy(uniform, std::vector<int>{0, 9, 2}, std::vector<uint8_t>(3, 1)),
                  std::invalid_argument);  // masked label out of range
  DenseMatrix bad(2, 3);
  for (double& v : bad.data) v = 0.5;
  CHECK_THROWS_AS(cross_entropy(bad, std::vector<int>{0, 1}, std::vector<uint8_t>(2, 1)),
                  std::invalid_argument);  // rows do not sum to 1
}

TEST_CASE("cross_entropy matches a long-double oracle") {
  Rng rng(5);
  const int n = 9, k = 5;
  DenseMatrix probs(n, k);
  std::vector<int> labels(n);
  std::vector<uint8_t> mask(n, 0);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int c = 0; c < k; ++c) {
      probs(i, c) = 0.05 + rng.uniform();
      row += probs(i, c);
    }
    for (int c = 0; c < k; ++c) probs(i, c) /= row;
    labels[i] = rng.uniform_int(k);
    mask[i] = i % 3 != 1;
  }
  long double acc = 0.0;
  int cnt = 0;
  for (int i = 0; i < n; ++i)
    if (mask[i]) {
      acc -= std::log(static_cast<long double>(probs(i, labels[i])));
      ++cnt;
    }
  const double expected = static_cast<double>(acc / cnt);
  CHECK(cross_entropy(probs, labels, mask) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("cross_entropy gradient matches finite differences") {
  Rng rng(7);
  const int n = 6, k = 4;
  DenseMatrix logits = testutil::random_dense(n, k, rng);
  std::vector<int> labels(n);
  std::vector<uint8_t> mask(n, 0);
  for (int i = 0; i < n; ++i) {
    labels[i] = rng.uniform_int(k);
    mask[i] = i != 2;
  }
  DenseMatrix analytic;
  cross_entropy(softmax_rows(logits), labels, mask, &analytic);
  testutil::GradCompare gc;
  for (size_t s = 0; s < logits.data.size(); ++s) {
    const double num = testutil::central_diff(
        logits.data[s], [&] { return cross_entropy(softmax_rows(logits), labels, mask); });
    gc.add(analytic.data[s], num);
  }
  CHECK(gc.max_rel <= 1e-5);
}

TEST_CASE("train_surrogate separates a linear toy and is deterministic") {
  const int n = 10;
  DenseMatrix x(n, 2);
  std::vector<std::pair<int, int>> no_edges;
  for (int i = 0; i < n; ++i) x(i, i < 5 ? 0 : 1) = 1.0;
  AttributedGraph g = make_graph(n, no_edges, std::move(x));
  g.num_classes = 2;
  g.labels.resize(n);
  for (int i = 0; i < n; ++i) g.labels[i] = i < 5 ? 0 : 1;
  g.train_mask.assign(n, 1);
  g.val_mask.assign(n, 0);
  g.test_mask.assign(n, 0);

  const SurrogateModel s = train_surrogate(g, 200, 0.5, 1);
  CHECK(surrogate_predictions(s, g) == g.labels);
  const double trained = cross_entropy(softmax_rows(surrogate_logits(s, g)), g.labels,
                                       g.train_mask);
  CHECK(trained < std::log(2.0));  // decreased from the uniform init loss

  const SurrogateModel again = train_surrogate(g, 200, 0.5, 1);
  CHECK(again.weight.data == s.weight.data);
}

TEST_CASE("train_surrogate zero epochs gives uniform logits with loss ln k") {
  const AttributedGraph g = toy_labeled(7, 3, 7, 13);
  const SurrogateModel s = train_surrogate(g, 0, 0.5, 1);
  for (double v : s.weight.data) CHECK(v == 0.0);
  const double loss =
      cross_entropy(softmax_rows(surrogate_logits(s, g)), g.labels, g.train_mask);
  CHECK(loss == doctest::Approx(1.9459101490553133).epsilon(1e-14));
  CHECK(loss == doctest::Approx(std::log(7.0)).epsilon(1e-15));
}

TEST_CASE("train_surrogate requires labels and mask") {
  AttributedGraph g = toy_labeled(5, 3, 2, 3);
  g.labels.clear();
  CHECK_THROWS_AS(train_surrogate(g, 10, 0.5, 1), std::invalid_argument);
}

TEST_CASE("structure_gradient matches hand-computed two-node chains") {
  AhatFactors f;
  f.du.push_back(DenseMatrix(2, 1));
  f.p.push_back(DenseMatrix(2, 1));
  f.du[0](0, 0) = 1.0;
  f.du[0](1, 0) = 2.0;
  f.p[0](0, 0) = 3.0;
  f.p[0](1, 0) = 5.0;

  // With the edge present: d = (2, 2), dL/dA_01 = 0.375, dL/dA_10 = -0.875.
  AttributedGraph with_edge = make_graph(2, {{0, 1}}, DenseMatrix(2, 1));
  auto scored = structure_gradient(f, with_edge, normalize_adjacency(with_edge), {{0, 1}});
  REQUIRE(scored.size() == 1);
  CHECK(scored[0].flip.direction == EdgeFlip::Dir::remove);
  CHECK(scored[0].score == doctest::Approx(0.5).epsilon(1e-15));

  // Without the edge: A-hat = I, dL/dA_01 = 2, dL/dA_10 = -4.
  AttributedGraph no_edge = make_graph(2, {}, DenseMatrix(2, 1));
  scored = structure_gradient(f, no_edge, normalize_adjacency(no_edge), {{0, 1}});
  REQUIRE(scored.size() == 1);
  CHECK(scored[0].flip.direction == EdgeFlip::Dir::add);
  CHECK(scored[0].score == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("structure_gradient: constant objective scores zero, ties sort lexicographically") {
  const AttributedGraph g = toy_labeled(5, 3, 2, 9);
  AhatFactors f;
  f.du.push_back(DenseMatrix(5, 2));
  f.p.push_back(DenseMatrix(5, 2));
  const auto scored = structure_gradient(f, g, normalize_adjacency(g), all_pairs(5));
  REQUIRE(scored.size() == 10);
  for (size_t t = 0; t < scored.size(); ++t) {
    CHECK(scored[t].score == 0.0);
    if (t > 0)
      CHECK((scored[t - 1].flip.i < scored[t].flip.i ||
             (scored[t - 1].flip.i == scored[t].flip.i &&
              scored[t - 1].flip.j < scored[t].flip.j)));
  }
  CHECK_THROWS_AS(structure_gradient(f, g, normalize_adjacency(g), {}), std::invalid_argument);
}

TEST_CASE("structure_gradient top flip lands in exhaustive top-3 on 6-node toys") {
  int hits = 0;
  const int trials = 8;
  for (int trial = 0; trial < trials; ++trial) {
    const AttributedGraph g = toy_labeled(6, 4, 3, 70 + trial, 0.45);
    const SurrogateModel s = train_surrogate(g, 80, 0.5, 1);
    const SparseMatrix a_hat = normalize_adjacency(g);
    const auto scored =
        structure_gradient(ce_factors(g, a_hat, s, g.labels, g.train_mask), g, a_hat,
                           all_pairs(6));
    const double base = oracle_ce(g, s.weight, s.hops, g.labels, g.train_mask);
    std::vector<double> deltas;
    double top_delta = 0.0;
    for (auto [i, j] : all_pairs(6)) {
      const AttributedGraph g2 = apply_flip(g, toggle_of(g, i, j));
      const double delta = oracle_ce(g2, s.weight, s.hops, g.labels, g.train_mask) - base;
      deltas.push_back(delta);
      if (i == scored[0].flip.i && j == scored[0].flip.j) top_delta = delta;
    }
    std::sort(deltas.rbegin(), deltas.rend());
    if (top_delta >= deltas[2] - 1e-12) ++hits;
  }
  CHECK(hits >= 6);
}

TEST_CASE("flips_for_rate rounds up") {
  const AttributedGraph g = toy_labeled(8, 3, 2, 31, 0.5);
  REQUIRE(g.edge_count() > 0);
  CHECK(flips_for_rate(g, 0.0) == 0);
  CHECK(flips_for_rate(g, 0.05) ==
        static_cast<int>(std::ceil(0.05 * g.edge_count())));
  CHECK(flips_for_rate(g, 1.0) == g.edge_count());
  CHECK_THROWS_AS(flips_for_rate(g, -0.1), std::invalid_argument);
}

TEST_CASE("supervised_attack: budget 0 is the identity and input is never mutated") {
  const AttributedGraph g = toy_labeled(7, 4, 3, 41);
  const AttributedGraph snapshot = g;
  PerturbationBudget budget;
  budget.max_flips = 0;
  const AttackResult r0 = supervised_attack(g, budget, SurrogateConfig{}, 1);
  CHECK(same_adjacency(r0.perturbed.adjacency, g.adjacency));
  CHECK(r0.flips.empty());
  CHECK(r0.loss_trace.empty());

  budget.max_flips = 2;
  const AttackResult r2 = supervised_attack(g, budget, SurrogateConfig{}, 1);
  CHECK(same_adjacency(g.adjacency, snapshot.adjacency));
  CHECK(g.features.data == snapshot.features.data);
  CHECK(g.labels == snapshot.labels);
  check_result_invariants(g, budget, r2);
}

TEST_CASE("supervised_attack first flip beats 70% of all single flips") {
  for (uint64_t seed : {3u, 4u, 5u}) {
    const AttributedGraph g = toy_labeled(6, 5, 3, seed, 0.45);
    PerturbationBudget budget;
    budget.max_flips = 1;
    budget.min_degree_floor = 0;
    SurrogateConfig cfg;  // full train mask: self-training labels == true labels
    const AttackResult r = supervised_attack(g, budget, cfg, seed);
    REQUIRE(r.flips.size() == 1);

    const SurrogateModel s = train_surrogate(g, cfg.epochs, cfg.lr, seed);
    const double base = oracle_ce(g, s.weight, cfg.hops, g.labels, g.train_mask);
    const double chosen =
        oracle_ce(r.perturbed, s.weight, cfg.hops, g.labels, g.train_mask) - base;
    int beaten = 0, total = 0;
    for (auto [i, j] : all_pairs(6)) {
      const AttributedGraph g2 = apply_flip(g, toggle_of(g, i, j));
      const double delta = oracle_ce(g2, s.weight, cfg.hops, g.labels, g.train_mask) - base;
      ++total;
      if (chosen >= delta) ++beaten;
    }
    CHECK(beaten * 10 >= total * 7);
  }
}

TEST_CASE("supervised_attack budget must not exceed the admissible candidates") {
  // K4 with floor 3: every pair is an edge and every removal is blocked.
  const AttributedGraph g = toy_labeled(4, 3, 2, 17, 1.1);
  REQUIRE(g.edge_count() == 6);
  PerturbationBudget budget;
  budget.max_flips = 1;
  budget.min_degree_floor = 3;
  CHECK_THROWS_AS(supervised_attack(g, budget, SurrogateConfig{}, 1), std::invalid_argument);
  budget.max_flips = 0;
  CHECK(supervised_attack(g, budget, SurrogateConfig{}, 1).flips.empty());
}

TEST_CASE("supervised_attack incident policy only touches targets") {
  const AttributedGraph g = toy_labeled(7, 4, 3, 23);
  PerturbationBudget budget;
  budget.max_flips = 3;
  budget.policy = PerturbationBudget::Policy::incident_to_targets;
  budget.min_degree_floor = 0;
  budget.targets = {2, 4};
  const AttackResult r = supervised_attack(g, budget, SurrogateConfig{}, 2);
  for (const EdgeFlip& f : r.flips)
    CHECK((f.i == 2 || f.j == 2 || f.i == 4 || f.j == 4));
  check_result_invariants(g, budget, r);

  budget.targets.clear();
  CHECK_THROWS_AS(supervised_attack(g, budget, SurrogateConfig{}, 2), std::invalid_argument);
}

TEST_CASE("supervised_attack with retraining and batched scoring keeps a rising trace") {
  const AttributedGraph g = toy_labeled(8, 4, 3, 29, 0.45);
  PerturbationBudget budget;
  budget.max_flips = 4;
  budget.min_degree_floor = 0;
  const AttackResult r = supervised_attack(g, budget, SurrogateConfig{}, 3, /*retrain_every=*/2);
  check_result_invariants(g, budget, r);
  for (size_t t = 1; t < r.loss_trace.size(); ++t)
    CHECK(r.loss_trace[t] > r.loss_trace[t - 1]);

  const AttackResult rb =
      supervised_attack(g, budget, SurrogateConfig{}, 3, /*retrain_every=*/2, /*score_batch=*/8);
  check_result_invariants(g, budget, rb);
}

TEST_CASE("unsupervised_attack: identity, exhaustive quality, determinism, label-blind") {
  Rng rng(61);
  const AttributedGraph g = toy_labeled(6, 4, 3, 11, 0.45);
  const EncoderParams f1 = init_encoder({4, 5}, rng);
  const EncoderParams f2 = init_encoder({4, 5}, rng);
  const DiscriminatorParams d = init_discriminator(5, rng);
  const uint64_t seed = 77;

  PerturbationBudget budget;
  budget.max_flips = 0;
  CHECK(same_adjacency(unsupervised_attack(g, f1, f2, d, budget, seed).perturbed.adjacency,
                       g.adjacency));

  budget.max_flips = 1;
  budget.min_degree_floor = 0;
  const AttackResult r = unsupervised_attack(g, f1, f2, d, budget, seed);
  REQUIRE(r.flips.size() == 1);
  check_result_invariants(g, budget, r);

  // Exhaustive oracle over the same frozen clean side.
  const Eq18Cache cache = make_eq18_cache(f1, f2, g, normalize_adjacency(g), seed);
  const double chosen =
      eq18_objective(cache, f2, d, normalize_adjacency(r.perturbed), false).value;
  int beaten = 0, total = 0;
  for (auto [i, j] : all_pairs(6)) {
    const AttributedGraph g2 = apply_flip(g, toggle_of(g, i, j));
    const double v = eq18_objective(cache, f2, d, normalize_adjacency(g2), false).value;
    ++total;
    if (chosen >= v) ++beaten;
  }
  CHECK(beaten * 10 >= total * 7);

  const AttackResult again = unsupervised_attack(g, f1, f2, d, budget, seed);
  CHECK(again.loss_trace == r.loss_trace);
  CHECK(same_adjacency(again.perturbed.adjacency, r.perturbed.adjacency));

  AttributedGraph blind = g;
  std::fill(blind.labels.begin(), blind.labels.end(), 0);
  const AttackResult rb = unsupervised_attack(blind, f1, f2, d, budget, seed);
  CHECK(rb.loss_trace == r.loss_trace);
  CHECK(same_adjacency(rb.perturbed.adjacency, r.perturbed.adjacency));
}

TEST_CASE("targeted_attack identity, monotone margin, invariants") {
  const AttributedGraph g = toy_labeled(6, 5, 3, 21, 0.5, /*binary_features=*/true);
  const SurrogateModel s = train_surrogate(g, 100, 0.5, 0);
  int target = 0;
  for (int i = 1; i < g.n(); ++i)
    if (g.degree(i) > g.degree(target)) target = i;

  const AttackResult r0 = targeted_attack(g, target, 0, s, 1);
  CHECK(same_adjacency(r0.perturbed.adjacency, g.adjacency));
  CHECK(r0.loss_trace.empty());

  const AttributedGraph snapshot = g;
  const AttackResult r = targeted_attack(g, target, 3, s, 1);
  CHECK(same_adjacency(g.adjacency, snapshot.adjacency));
  CHECK(g.features.data == snapshot.features.data);
  CHECK(perturbation_distance(g, r.perturbed) == static_cast<int>(r.flips.size()));
  int feature_diffs = 0;
  for (size_t t = 0; t < g.features.data.size(); ++t)
    if (g.features.data[t] != r.perturbed.features.data[t]) ++feature_diffs;
  CHECK(feature_diffs == static_cast<int>(r.feature_flips.size()));
  CHECK(r.step_kinds.size() == r.loss_trace.size());
  for (size_t t = 1; t < r.loss_trace.size(); ++t)
    CHECK(r.loss_trace[t] >= r.loss_trace[t - 1]);  // margins non-increasing
  if (!r.loss_trace.empty())
    CHECK(surrogate_margin(s, r.perturbed, target) == -r.loss_trace.back());
}

TEST_CASE("targeted_attack step 1 ties the exhaustive candidate optimum") {
  for (uint64_t seed : {21u, 22u, 25u}) {
    const AttributedGraph g = toy_labeled(6, 5, 3, seed, 0.5, /*binary_features=*/true);
    const SurrogateModel s = train_surrogate(g, 100, 0.5, 0);
    int target = 0;
    for (int i = 1; i < g.n(); ++i)
      if (g.degree(i) > g.degree(target)) target = i;

    const AttackResult r = targeted_attack(g, target, 1, s, 1);
    if (r.loss_trace.empty()) continue;  // no candidate kept the margin non-increasing

    double best = std::numeric_limits<double>::infinity();
    for (int u = 0; u < g.n(); ++u) {
      if (u == target) continue;
      const auto [a, b] = std::minmax(target, u);
      if (g.adjacency.has(a, b) && (g.degree(a) <= 1 || g.degree(b) <= 1)) continue;
      const AttributedGraph g2 = apply_flip(g, toggle_of(g, a, b));
      best = std::min(best, oracle_margin(g2, s.weight, s.hops, target));
    }
    for (int f = 0; f < g.dim(); ++f) {
      AttributedGraph g2 = g;
      g2.features(target, f) = g2.features(target, f) == 1.0 ? 0.0 : 1.0;
      best = std::min(best, oracle_margin(g2, s.weight, s.hops, target));
    }
    CHECK(-r.loss_trace[0] == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("targeted_attack input validation") {
  AttributedGraph g = toy_labeled(5, 4, 2, 33, 0.5, /*binary_features=*/true);
  const SurrogateModel s = train_surrogate(g, 20, 0.5, 0);
  CHECK_THROWS_AS(targeted_attack(g, -1, 1, s, 0), std::invalid_argument);
  CHECK_THROWS_AS(targeted_attack(g, 5, 1, s, 0), std::invalid_argument);
  g.features(2, 1) = 0.5;
  CHECK_THROWS_AS(targeted_attack(g, 2, 1, s, 0), std::invalid_argument);
}

TEST_CASE("attack result text round trip") {
  const AttributedGraph g = toy_labeled(7, 4, 3, 47);
  PerturbationBudget budget;
  budget.max_flips = 2;
  budget.min_degree_floor = 0;
  const AttackResult r = supervised_attack(g, budget, SurrogateConfig{}, 9);
  REQUIRE(!r.flips.empty());

  AttackHeader h;
  h.dataset = "toy7";
  h.objective = "supervised-ce";
  h.seed = 9;
  h.budget = budget.max_flips;
  const std::string path = temp_path("graphacl_attack_roundtrip.txt");
  save_attack_result(path, h, r);

  AttackHeader back;
  const AttackResult replayed = replay_attack(path, g, &back);
  CHECK(back.dataset == h.dataset);
  CHECK(back.objective == h.objective);
  CHECK(back.seed == h.seed);
  CHECK(back.budget == h.budget);
  CHECK(replayed.loss_trace == r.loss_trace);  // %.17g round-trips exactly
  REQUIRE(replayed.flips.size() == r.flips.size());
  for (size_t t = 0; t < r.flips.size(); ++t) {
    CHECK(replayed.flips[t].i == r.flips[t].i);
    CHECK(replayed.flips[t].j == r.flips[t].j);
    CHECK(replayed.flips[t].direction == r.flips[t].direction);
  }
  CHECK(same_adjacency(replayed.perturbed.adjacency, r.perturbed.adjacency));
  std::filesystem::remove(path);
}

TEST_CASE("attack result round trip preserves interleaved feature flips") {
  const AttributedGraph g = toy_labeled(5, 4, 2, 53, 0.0, /*binary_features=*/true);
  REQUIRE(!g.adjacency.has(0, 2));
  AttackResult r;
  r.flips = {make_flip(0, 2, EdgeFlip::Dir::add), make_flip(0, 1, EdgeFlip::Dir::remove)};
  r.feature_flips = {{3, 1}};
  r.step_kinds = {0, 1, 0};
  r.loss_trace = {0.25, 0.5, 1.0 / 3.0};
  r.perturbed = g;  // not serialized

  AttackHeader h;
  h.dataset = "toy5";
  h.objective = "targeted-margin";
  const std::string path = temp_path("graphacl_attack_interleave.txt");
  save_attack_result(path, h, r);
  const AttackResult replayed = replay_attack(path, g);
  CHECK(replayed.step_kinds == (std::vector<uint8_t>{0, 1, 0}));
  REQUIRE(replayed.feature_flips.size() == 1);
  CHECK(replayed.feature_flips[0].node == 3);
  CHECK(replayed.feature_flips[0].feature == 1);
  CHECK(replayed.loss_trace == r.loss_trace);
  AttributedGraph manual = apply_flip(g, r.flips[0]);
  manual = apply_flip(manual, r.flips[1]);
  manual.features(3, 1) = manual.features(3, 1) == 1.0 ? 0.0 : 1.0;
  CHECK(same_adjacency(replayed.perturbed.adjacency, manual.adjacency));
  CHECK(replayed.perturbed.features.data == manual.features.data);
  std::filesystem::remove(path);
}

TEST_CASE("replay_attack rejects malformed files") {
  const AttributedGraph g = toy_labeled(4, 3, 2, 59, 0.0);
  const std::string path = temp_path("graphacl_attack_bad.txt");
  auto write_file = [&](const char* body) {
    std::ofstream out(path);
    out << body;
  };

  CHECK_THROWS_AS(replay_attack(temp_path("graphacl_missing.txt"), g), ParseError);

  write_file("dataset t\nseed 1\nbudget 1\nobjective o\n");
  CHECK_THROWS_AS(replay_attack(path, g), ParseError);  // missing flips count

  write_file("dataset t\nseed 1\nbudget 1\nobjective o\nflips 1\n2 0 1 add 0.5\n");
  CHECK_THROWS_AS(replay_attack(path, g), ParseError);  // step out of order

  write_file("dataset t\nseed 1\nbudget 1\nobjective o\nflips 1\n1 0 1 bogus 0.5\n");
  CHECK_THROWS_AS(replay_attack(path, g), ParseError);  // unknown kind

  write_file("dataset t\nseed 1\nbudget 1\nobjective o\nflips 2\n1 0 1 add 0.5\n");
  CHECK_THROWS_AS(replay_attack(path, g), ParseError);  // truncated list

  // Inapplicable: (0, 1) is an edge of the base graph, adding it must fail.
  const AttributedGraph ge = toy_labeled(4, 3, 2, 59, 1.1);
  write_file("dataset t\nseed 1\nbudget 1\nobjective o\nflips 1\n1 0 1 add 0.5\n");
  CHECK_THROWS_AS(replay_attack(path, ge), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("attack validity sweep on random toys") {
  for (uint64_t seed = 100; seed < 105; ++seed) {
    const AttributedGraph g = toy_labeled(8, 4, 3, seed, 0.4);
    Rng rng(seed);
    const EncoderParams f1 = init_encoder({4, 6}, rng);
    const EncoderParams f2 = init_encoder({4, 6}, rng);
    const DiscriminatorParams d = init_discriminator(6, rng);

    PerturbationBudget budget;
    budget.max_flips = 3;
    const AttackResult rs = supervised_attack(g, budget, SurrogateConfig{}, seed);
    check_result_invariants(g, budget, rs);
    const AttackResult ru = unsupervised_attack(g, f1, f2, d, budget, seed);
    check_result_invariants(g, budget, ru);
  }
}
