#include "graphacl/synth.hpp"

#include <algorithm>
#include <set>

#include "graphacl/rng.hpp"

namespace graphacl {

void SynthSpec::validate() const {
  detail::require(nodes >= 2 && classes >= 2 && dim >= classes,
                  "SynthSpec: need >= 2 nodes, >= 2 classes, dim >= classes");
  detail::require(target_edges >= nodes - 1, "SynthSpec: too few edges for connected growth");
  detail::require(homophily >= 0.0 && homophily <= 1.0 && topic_purity >= 0.0 &&
                      topic_purity <= 1.0,
                  "SynthSpec: rates outside [0, 1]");
  detail::require(words_per_node >= 1, "SynthSpec: words_per_node must be >= 1");
  detail::require(train_per_class >= 1 && val_count >= 0 && test_count >= 0,
                  "SynthSpec: bad split sizes");
  detail::require(classes * train_per_class + val_count + test_count <= nodes,
                  "SynthSpec: splits exceed node count");
}

AttributedGraph synth_planetoid(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  const int n = spec.nodes, k = spec.classes, d = spec.dim;

  std::vector<int> labels(n);
  std::vector<int> count(k, 0);
  for (int i = 0; i < n; ++i) ++count[labels[i] = rng.uniform_int(k)];
  // Every class must be able to fill its train quota.
  for (int c = 0; c < k; ++c)
    while (count[c] < spec.train_per_class) {
      const int donor =
          static_cast<int>(std::max_element(count.begin(), count.end()) - count.begin());
      for (int i = 0; i < n; ++i)
        if (labels[i] == donor) {
          labels[i] = c;
          --count[donor];
          ++count[c];
          break;
        }
    }

  // Binary bag-of-words: class c owns the contiguous topic block c*(d/k)..
  DenseMatrix x(n, d);
  const int block = d / k;
  for (int i = 0; i < n; ++i)
    for (int w = 0; w < spec.words_per_node; ++w) {
      const int f = rng.uniform() < spec.topic_purity
                        ? labels[i] * block + rng.uniform_int(block)
                        : rng.uniform_int(d);
      x(i, f) = 1.0;
    }

  // Homophilous preferential attachment: weight(u) = degree(u) + 1, kept as
  // repeated entries in the pools; `homophily` of the edges draw their far
  // endpoint from the source's class pool.
  std::vector<std::pair<int, int>> edges;
  std::set<std::pair<int, int>> seen;
  std::vector<int> pool;
  std::vector<std::vector<int>> class_pool(k);
  pool.push_back(0);
  class_pool[labels[0]].push_back(0);

  auto attach = [&](int v) {
    const bool same = rng.uniform() < spec.homophily;
    for (int attempt = 0; attempt < 40; ++attempt) {
      const std::vector<int>& src =
          same && !class_pool[labels[v]].empty() ? class_pool[labels[v]] : pool;
      const int u = src[rng.uniform_int(static_cast<int>(src.size()))];
      if (u == v) continue;
      const auto key = std::minmax(u, v);
      if (!seen.insert(key).second) continue;
      edges.push_back(key);
      pool.push_back(u);
      pool.push_back(v);
      class_pool[labels[u]].push_back(u);
      class_pool[labels[v]].push_back(v);
      return true;
    }
    return false;
  };

  for (int v = 1; v < n; ++v) {
    attach(v);
    pool.push_back(v);
    class_pool[labels[v]].push_back(v);
  }
  const int extras = spec.target_edges - (n - 1);
  for (int e = 0; e < extras; ++e)
    attach(pool[rng.uniform_int(static_cast<int>(pool.size()))]);

  AttributedGraph g = make_graph(n, edges, std::move(x));
  g.labels = std::move(labels);
  g.num_classes = k;

  // Planetoid-style splits: per-class quota in id order, validation next,
  // test from the tail.
  g.train_mask.assign(n, 0);
  g.val_mask.assign(n, 0);
  g.test_mask.assign(n, 0);
  std::vector<int> quota(k, spec.train_per_class);
  for (int i = 0; i < n; ++i)
    if (quota[g.labels[i]] > 0) {
      g.train_mask[i] = 1;
      --quota[g.labels[i]];
    }
  int need = spec.val_count;
  for (int i = 0; i < n && need > 0; ++i)
    if (!g.train_mask[i]) {
      g.val_mask[i] = 1;
      --need;
    }
  need = spec.test_count;
  for (int i = n - 1; i >= 0 && need > 0; --i)
    if (!g.train_mask[i] && !g.val_mask[i]) {
      g.test_mask[i] = 1;
      --need;
    }
  g.validate();
  return g;
}

SynthSpec cora_like() {
  SynthSpec s;
  s.name = "cora-synth";
  s.nodes = 2708;
  s.dim = 1433;
  s.classes = 7;
  s.target_edges = 5278;
  s.train_per_class = 20;
  s.val_count = 500;
  s.test_count = 1000;
  s.homophily = 0.5;
  s.topic_purity = 0.5;
  s.words_per_node = 18;
  s.seed = 0xC08AUL;
  return s;
}

SynthSpec citeseer_like() {
  SynthSpec s;
  s.name = "citeseer-synth";
  s.nodes = 3327;
  s.dim = 3703;
  s.classes = 6;
  s.target_edges = 4552;
  s.train_per_class = 20;
  s.val_count = 500;
  s.test_count = 1000;
  s.homophily = 0.6;
  s.topic_purity = 0.55;
  s.words_per_node = 24;
  s.seed = 0xC17E5EE8UL;
  return s;
}

}  // namespace graphacl
