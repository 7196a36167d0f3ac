#include "graphacl/attack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <set>
#include <sstream>

#include "graphacl/dataset_io.hpp"

namespace graphacl {

namespace {

// logits = A-hat^hops (X W)
DenseMatrix fold_logits(const SparseMatrix& a_hat, const DenseMatrix& x, const DenseMatrix& w,
                        int hops) {
  DenseMatrix m = matmul(x, w);
  for (int t = 0; t < hops; ++t) m = spmm(a_hat, m);
  return m;
}

}  // namespace

SurrogateModel train_surrogate(const AttributedGraph& g, int epochs, double lr, uint64_t seed,
                               int hops) {
  (void)seed;  // zero init + full-batch descent: the trajectory is deterministic
  detail::require(g.has_labels() && g.has_masks(),
                  "train_surrogate: labels and train mask required");
  detail::require(epochs >= 0, "train_surrogate: negative epochs");
  detail::require(lr > 0.0 && std::isfinite(lr), "train_surrogate: bad learning rate");
  detail::require(g.num_classes >= 2, "train_surrogate: need at least two classes");
  detail::require(hops >= 1, "train_surrogate: hops must be >= 1");

  SurrogateModel s;
  s.hops = hops;
  s.weight = DenseMatrix(g.dim(), g.num_classes);
  const SparseMatrix a_hat = normalize_adjacency(g);
  for (int e = 0; e < epochs; ++e) {
    DenseMatrix probs = softmax_rows(fold_logits(a_hat, g.features, s.weight, s.hops));
    DenseMatrix dlogits;
    cross_entropy(probs, g.labels, g.train_mask, &dlogits);
    for (int t = 0; t < s.hops; ++t) dlogits = spmm(a_hat, dlogits);  // A-hat symmetric
    const DenseMatrix dw = matmul_tn(g.features, dlogits);
    for (size_t i = 0; i < s.weight.data.size(); ++i) s.weight.data[i] -= lr * dw.data[i];
  }
  return s;
}

DenseMatrix surrogate_logits(const SurrogateModel& s, const AttributedGraph& g) {
  s.validate();
  detail::require(s.weight.rows == g.dim(), "surrogate_logits: feature dim mismatch");
  return fold_logits(normalize_adjacency(g), g.features, s.weight, s.hops);
}

std::vector<int> surrogate_predictions(const SurrogateModel& s, const AttributedGraph& g) {
  const DenseMatrix logits = surrogate_logits(s, g);
  std::vector<int> pred(g.n());
  for (int i = 0; i < logits.rows; ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols; ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    pred[i] = best;
  }
  return pred;
}

double cross_entropy(const DenseMatrix& probs, const std::vector<int>& labels,
                     const std::vector<uint8_t>& mask, DenseMatrix* grad_logits) {
  const int n = probs.rows;
  const int k = probs.cols;
  detail::require(static_cast<int>(labels.size()) == n && static_cast<int>(mask.size()) == n,
                  "cross_entropy: labels/mask length mismatch");
  int m = 0;
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int c = 0; c < k; ++c) row += probs(i, c);
    detail::require(std::abs(row - 1.0) <= 1e-6, "cross_entropy: probs rows must sum to 1");
    if (mask[i]) {
      detail::require(labels[i] >= 0 && labels[i] < k, "cross_entropy: masked label out of range");
      ++m;
    }
  }
  detail::require(m > 0, "cross_entropy: empty mask");

  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    if (mask[i]) acc -= std::log(probs(i, labels[i]));
  const double loss = acc / m;

  if (grad_logits) {
    *grad_logits = DenseMatrix(n, k);
    for (int i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      for (int c = 0; c < k; ++c)
        (*grad_logits)(i, c) = (probs(i, c) - (c == labels[i] ? 1.0 : 0.0)) / m;
    }
  }
  return loss;
}

namespace {

// Scores pair flips by chaining a factored dL/dA-hat through normalization.
struct FlipScorer {
  const AhatFactors& grad;
  const AttributedGraph& g;
  std::vector<double> rowcol;
  std::vector<double> dplus;

  FlipScorer(const AhatFactors& gr, const AttributedGraph& gg, const SparseMatrix& a_hat)
      : grad(gr), g(gg) {
    const int n = gg.n();
    detail::require(a_hat.rows == n && a_hat.cols == n, "flip scoring: A-hat size mismatch");
    detail::require(grad.du.size() == grad.p.size(), "flip scoring: malformed gradient factors");
    rowcol.assign(n, 0.0);
    for (size_t f = 0; f < grad.du.size(); ++f) {
      detail::require(grad.du[f].rows == n && grad.p[f].rows == n &&
                          grad.du[f].cols == grad.p[f].cols,
                      "flip scoring: factor shape mismatch");
      const DenseMatrix ap = spmm(a_hat, grad.p[f]);
      const DenseMatrix adu = spmm(a_hat, grad.du[f]);
      const int h = grad.du[f].cols;
      for (int i = 0; i < n; ++i)
        rowcol[i] += dot(grad.du[f].row(i), ap.row(i), h) + dot(grad.p[f].row(i), adu.row(i), h);
    }
    dplus.resize(n);
    for (int i = 0; i < n; ++i) dplus[i] = g.degree(i) + 1.0;
  }

  double dl_da(int i, int j) const {
    return grad.entry(i, j) / std::sqrt(dplus[i] * dplus[j]) - rowcol[i] / (2.0 * dplus[i]);
  }

  double score(int i, int j) const {
    const double s = dl_da(i, j) + dl_da(j, i);
    return g.adjacency.has(i, j) ? -s : s;  // (1 - 2 A_ij)
  }
};

bool better_flip(const ScoredFlip& a, const ScoredFlip& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.flip.i != b.flip.i) return a.flip.i < b.flip.i;
  return a.flip.j < b.flip.j;
}

// Admissibility: in-policy, not already flipped, and removals keep both
// endpoints at or above the degree floor.
struct CandidateFilter {
  const AttributedGraph& g;
  const PerturbationBudget& budget;
  const std::set<std::pair<int, int>>& used;
  std::vector<uint8_t> in_targets;

  CandidateFilter(const AttributedGraph& gg, const PerturbationBudget& b,
                  const std::set<std::pair<int, int>>& u)
      : g(gg), budget(b), used(u) {
    if (budget.policy == PerturbationBudget::Policy::incident_to_targets) {
      detail::require(!budget.targets.empty(), "attack: incident policy with no targets");
      in_targets.assign(g.n(), 0);
      for (int t : budget.targets) {
        detail::require(t >= 0 && t < g.n(), "attack: target out of range");
        in_targets[t] = 1;
      }
    }
  }

  bool admissible(int i, int j) const {
    if (!in_targets.empty() && !in_targets[i] && !in_targets[j]) return false;
    if (used.count({i, j})) return false;
    if (g.adjacency.has(i, j) &&
        (g.degree(i) <= budget.min_degree_floor || g.degree(j) <= budget.min_degree_floor))
      return false;
    return true;
  }

  int64_t count() const {
    int64_t c = 0;
    for (int i = 0; i < g.n(); ++i)
      for (int j = i + 1; j < g.n(); ++j)
        if (admissible(i, j)) ++c;
    return c;
  }
};

// Best `k` admissible flips in better_flip order, without materializing the
// full candidate list. Equivalent to sorting every candidate and taking the
// first k: better_flip is a strict total order (pairs are distinct).
std::vector<ScoredFlip> top_scored(const FlipScorer& sc, const CandidateFilter& filt, int k) {
  auto worse_on_top = [](const ScoredFlip& a, const ScoredFlip& b) { return better_flip(a, b); };
  std::priority_queue<ScoredFlip, std::vector<ScoredFlip>, decltype(worse_on_top)> heap(
      worse_on_top);
  const int n = sc.g.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (!filt.admissible(i, j)) continue;
      ScoredFlip f{make_flip(i, j, sc.g.adjacency.has(i, j) ? EdgeFlip::Dir::remove
                                                            : EdgeFlip::Dir::add),
                   sc.score(i, j)};
      if (static_cast<int>(heap.size()) < k) {
        heap.push(f);
      } else if (better_flip(f, heap.top())) {
        heap.pop();
        heap.push(f);
      }
    }
  std::vector<ScoredFlip> out;
  out.reserve(heap.size());
  while (!heap.empty()) {
    out.push_back(heap.top());
    heap.pop();
  }
  std::reverse(out.begin(), out.end());
  return out;
}

struct StructureObjective {
  std::function<double(const AttributedGraph&, const SparseMatrix&)> value;
  std::function<AhatFactors(const AttributedGraph&, const SparseMatrix&)> factors;
  // Returns true when internal state changed and the baseline objective must
  // be re-evaluated (e.g. surrogate retrained).
  std::function<bool(const AttributedGraph&, int)> refresh;
};

constexpr int kTryCap = 64;

AttackResult greedy_structure_attack(const AttributedGraph& g, const PerturbationBudget& budget,
                                     const StructureObjective& objective, int score_batch) {
  detail::require(budget.max_flips >= 0, "attack: negative budget");
  detail::require(budget.min_degree_floor >= 0, "attack: negative degree floor");
  detail::require(score_batch >= 1, "attack: score_batch must be >= 1");

  AttackResult result;
  result.perturbed = g;
  std::set<std::pair<int, int>> used;
  {
    const CandidateFilter filt(g, budget, used);
    detail::require(static_cast<int64_t>(budget.max_flips) <= filt.count(),
                    "attack: budget exceeds admissible candidate count");
  }
  if (budget.max_flips == 0) return result;

  AttributedGraph work = g;
  SparseMatrix a_hat = normalize_adjacency(work);
  double obj = objective.value(work, a_hat);
  double trace = obj;

  while (static_cast<int>(result.flips.size()) < budget.max_flips) {
    if (objective.refresh &&
        objective.refresh(work, static_cast<int>(result.flips.size())))
      obj = objective.value(work, a_hat);
    const AhatFactors factors = objective.factors(work, a_hat);
    const FlipScorer scorer(factors, work, a_hat);
    const std::vector<ScoredFlip> top =
        top_scored(scorer, CandidateFilter(work, budget, used), kTryCap);

    int applied = 0;
    const int room = budget.max_flips - static_cast<int>(result.flips.size());
    for (const ScoredFlip& cand : top) {
      if (applied == std::min(score_batch, room)) break;
      // Earlier flips in this batch may have changed degrees.
      if (!CandidateFilter(work, budget, used).admissible(cand.flip.i, cand.flip.j)) continue;
      AttributedGraph next = apply_flip(work, cand.flip);
      SparseMatrix next_hat = normalize_adjacency(next);
      const double v = objective.value(next, next_hat);
      if (!(v > obj)) continue;  // must strictly increase the exact objective
      trace += v - obj;
      obj = v;
      work = std::move(next);
      a_hat = std::move(next_hat);
      used.insert({cand.flip.i, cand.flip.j});
      result.flips.push_back(cand.flip);
      result.step_kinds.push_back(0);
      result.loss_trace.push_back(trace);
      ++applied;
    }
    if (applied == 0) break;  // no candidate improves: halt under budget
  }
  result.perturbed = std::move(work);
  return result;
}

}  // namespace

std::vector<ScoredFlip> structure_gradient(const AhatFactors& grad, const AttributedGraph& g,
                                           const SparseMatrix& a_hat,
                                           const std::vector<std::pair<int, int>>& candidates) {
  detail::require(!candidates.empty(), "structure_gradient: empty candidate set");
  const FlipScorer sc(grad, g, a_hat);
  std::vector<ScoredFlip> out;
  out.reserve(candidates.size());
  for (auto [i, j] : candidates) {
    detail::require(i >= 0 && j >= 0 && i < g.n() && j < g.n() && i != j,
                    "structure_gradient: candidate out of range");
    const auto [a, b] = std::minmax(i, j);
    out.push_back({make_flip(a, b,
                             g.adjacency.has(a, b) ? EdgeFlip::Dir::remove : EdgeFlip::Dir::add),
                   sc.score(a, b)});
  }
  std::sort(out.begin(), out.end(), better_flip);
  return out;
}

int flips_for_rate(const AttributedGraph& g, double rate) {
  detail::require(rate >= 0.0 && std::isfinite(rate), "flips_for_rate: bad rate");
  return static_cast<int>(std::ceil(rate * g.edge_count()));
}

namespace {

// CE of logits = A-hat^H M over (labels, mask); optionally also the
// dLoss/dA-hat factorization sum_t (A-hat^t dlogits)(A-hat^{H-1-t} M)^T.
double folded_cross_entropy(int hops, const DenseMatrix& m, const SparseMatrix& a_hat,
                            const std::vector<int>& labels, const std::vector<uint8_t>& mask,
                            AhatFactors* factors) {
  if (!factors) {
    DenseMatrix logits = m;
    for (int t = 0; t < hops; ++t) logits = spmm(a_hat, logits);
    return cross_entropy(softmax_rows(logits), labels, mask);
  }
  std::vector<DenseMatrix> powers;  // A-hat^t M, t = 0..H-1
  powers.push_back(m);
  for (int t = 1; t < hops; ++t) powers.push_back(spmm(a_hat, powers.back()));
  const DenseMatrix probs = softmax_rows(spmm(a_hat, powers.back()));
  DenseMatrix dlogits;
  const double value = cross_entropy(probs, labels, mask, &dlogits);
  AhatFactors f;
  f.du.push_back(std::move(dlogits));
  for (int t = 1; t < hops; ++t) f.du.push_back(spmm(a_hat, f.du.back()));
  for (int t = 0; t < hops; ++t) f.p.push_back(std::move(powers[hops - 1 - t]));
  *factors = std::move(f);
  return value;
}

}  // namespace

double surrogate_objective(const SurrogateModel& s, const SparseMatrix& a_hat,
                           const DenseMatrix& x, const std::vector<int>& labels,
                           const std::vector<uint8_t>& mask, AhatFactors* factors) {
  s.validate();
  detail::require(x.cols == s.weight.rows, "surrogate_objective: feature dim mismatch");
  return folded_cross_entropy(s.hops, matmul(x, s.weight), a_hat, labels, mask, factors);
}

AttackResult supervised_attack(const AttributedGraph& g, const PerturbationBudget& budget,
                               const SurrogateConfig& cfg, uint64_t seed, int retrain_every,
                               int score_batch) {
  detail::require(g.has_labels() && g.has_masks(),
                  "supervised_attack: labels and train mask required");
  detail::require(retrain_every >= 0, "supervised_attack: negative retrain cadence");

  SurrogateModel s = train_surrogate(g, cfg.epochs, cfg.lr, seed, cfg.hops);

  // Self-training labels, frozen from the initial surrogate.
  std::vector<int> labels = g.labels;
  std::vector<uint8_t> mask;
  if (cfg.objective_train_only) {
    mask = g.train_mask;
  } else {
    const std::vector<int> pred = surrogate_predictions(s, g);
    for (int i = 0; i < g.n(); ++i)
      if (!g.train_mask[i]) labels[i] = pred[i];
    mask.assign(g.n(), 1);
  }

  // X W only changes when the surrogate retrains; flips leave features alone.
  DenseMatrix m_cache = matmul(g.features, s.weight);

  StructureObjective objective;
  objective.value = [&](const AttributedGraph&, const SparseMatrix& a_hat) {
    return folded_cross_entropy(s.hops, m_cache, a_hat, labels, mask, nullptr);
  };
  objective.factors = [&](const AttributedGraph&, const SparseMatrix& a_hat) {
    AhatFactors f;
    folded_cross_entropy(s.hops, m_cache, a_hat, labels, mask, &f);
    return f;
  };
  int last_bucket = 0;
  objective.refresh = [&](const AttributedGraph& work, int flips_done) {
    if (retrain_every <= 0 || flips_done == 0) return false;
    const int bucket = flips_done / retrain_every;
    if (bucket == last_bucket) return false;
    last_bucket = bucket;
    s = train_surrogate(work, cfg.epochs, cfg.lr, seed, cfg.hops);
    m_cache = matmul(work.features, s.weight);
    return true;
  };

  return greedy_structure_attack(g, budget, objective, score_batch);
}

AttackResult unsupervised_attack(const AttributedGraph& g, const EncoderParams& f1,
                                 const EncoderParams& f2, const DiscriminatorParams& d,
                                 const PerturbationBudget& budget, uint64_t seed,
                                 int score_batch) {
  const SparseMatrix a_hat_clean = normalize_adjacency(g);
  const Eq18Cache cache = make_eq18_cache(f1, f2, g, a_hat_clean, seed);

  StructureObjective objective;
  objective.value = [&](const AttributedGraph&, const SparseMatrix& a_hat) {
    return eq18_objective(cache, f2, d, a_hat, false).value;
  };
  objective.factors = [&](const AttributedGraph&, const SparseMatrix& a_hat) {
    return std::move(*eq18_objective(cache, f2, d, a_hat, true).factors);
  };

  return greedy_structure_attack(g, budget, objective, score_batch);
}

namespace {

// (A-hat^hops e_t) without materializing A-hat: entries are recomputed from
// the adjacency and A+I degrees.
std::vector<double> hop_vector(const SparseMatrix& a, int t, int hops) {
  const int n = a.rows;
  std::vector<double> d(n);
  for (int i = 0; i < n; ++i) d[i] = (a.offs[i + 1] - a.offs[i]) + 1.0;
  std::vector<double> v(n, 0.0), next(n);
  v[t] = 1.0;
  for (int h = 0; h < hops; ++h) {
    for (int i = 0; i < n; ++i) next[i] = v[i] / d[i];  // diagonal 1/d_i
    for (int i = 0; i < n; ++i) {
      if (v[i] == 0.0) continue;
      for (int p = a.offs[i]; p < a.offs[i + 1]; ++p) {
        const int u = a.idx[p];
        next[u] += v[i] / std::sqrt(d[i] * d[u]);
      }
    }
    std::swap(v, next);
  }
  return v;
}

std::vector<double> local_logits(const SparseMatrix& a, const DenseMatrix& m, int t, int hops) {
  const std::vector<double> v = hop_vector(a, t, hops);
  std::vector<double> logits(m.cols, 0.0);
  for (int i = 0; i < a.rows; ++i) {
    if (v[i] == 0.0) continue;
    for (int c = 0; c < m.cols; ++c) logits[c] += v[i] * m(i, c);
  }
  return logits;
}

double margin_of(const std::vector<double>& logits, int y) {
  double best_other = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < static_cast<int>(logits.size()); ++c)
    if (c != y) best_other = std::max(best_other, logits[c]);
  return logits[y] - best_other;
}

// Row t of X W, recomputed with matmul's own access pattern.
void refresh_m_row(DenseMatrix& m, const DenseMatrix& x, const DenseMatrix& w, int t) {
  for (int c = 0; c < m.cols; ++c) m(t, c) = 0.0;
  for (int kk = 0; kk < x.cols; ++kk) {
    const double a = x(t, kk);
    if (a == 0.0) continue;
    axpy(a, w.row(kk), m.row(t), m.cols);
  }
}

}  // namespace

double surrogate_margin(const SurrogateModel& s, const AttributedGraph& g, int target) {
  detail::require(target >= 0 && target < g.n(), "surrogate_margin: target out of range");
  detail::require(g.has_labels() && g.labels[target] >= 0,
                  "surrogate_margin: target label unknown");
  const DenseMatrix m = matmul(g.features, s.weight);
  return margin_of(local_logits(g.adjacency, m, target, s.hops), g.labels[target]);
}

AttackResult targeted_attack(const AttributedGraph& g, int target, int n_perturbations,
                             const SurrogateModel& surrogate, uint64_t seed,
                             int min_degree_floor) {
  (void)seed;  // exact greedy with deterministic tie-breaking
  surrogate.validate();
  detail::require(target >= 0 && target < g.n(), "targeted_attack: target out of range");
  detail::require(n_perturbations >= 0, "targeted_attack: negative perturbation count");
  detail::require(g.has_labels() && g.labels[target] >= 0,
                  "targeted_attack: target label unknown");
  detail::require(surrogate.weight.rows == g.dim(), "targeted_attack: feature dim mismatch");
  const int dim = g.dim();
  for (int f = 0; f < dim; ++f) {
    const double v = g.features(target, f);
    detail::require(v == 0.0 || v == 1.0, "targeted_attack: target features must be boolean");
  }

  const int y = g.labels[target];
  AttackResult result;
  result.perturbed = g;
  AttributedGraph work = g;
  DenseMatrix m = matmul(work.features, surrogate.weight);
  double cur_margin = margin_of(local_logits(work.adjacency, m, target, surrogate.hops), y);

  std::set<std::pair<int, int>> used_pairs;
  std::set<int> used_feats;

  for (int step = 0; step < n_perturbations; ++step) {
    double best_margin = std::numeric_limits<double>::infinity();
    int best_u = -1, best_f = -1;

    for (int u = 0; u < g.n(); ++u) {
      if (u == target) continue;
      const auto [a, b] = std::minmax(target, u);
      if (used_pairs.count({a, b})) continue;
      const bool exists = work.adjacency.has(a, b);
      if (exists && (work.degree(a) <= min_degree_floor || work.degree(b) <= min_degree_floor))
        continue;
      const SparseMatrix adj =
          toggle_pair(work.adjacency, a, b);
      const double mg = margin_of(local_logits(adj, m, target, surrogate.hops), y);
      if (mg < best_margin) {
        best_margin = mg;
        best_u = u;
        best_f = -1;
      }
    }

    // Feature flips leave A-hat fixed: logits move by v[target] * (+-W[f,:]).
    {
      const std::vector<double> v = hop_vector(work.adjacency, target, surrogate.hops);
      std::vector<double> base(m.cols, 0.0);
      for (int i = 0; i < work.n(); ++i) {
        if (v[i] == 0.0) continue;
        for (int c = 0; c < m.cols; ++c) base[c] += v[i] * m(i, c);
      }
      for (int f = 0; f < dim; ++f) {
        if (used_feats.count(f)) continue;
        const double sign = work.features(target, f) == 1.0 ? -1.0 : 1.0;
        std::vector<double> logits = base;
        for (int c = 0; c < m.cols; ++c)
          logits[c] += v[target] * sign * surrogate.weight(f, c);
        const double mg = margin_of(logits, y);
        if (mg < best_margin) {
          best_margin = mg;
          best_u = -1;
          best_f = f;
        }
      }
    }

    if ((best_u < 0 && best_f < 0) || best_margin > cur_margin) break;

    if (best_u >= 0) {
      const auto [a, b] = std::minmax(target, best_u);
      const EdgeFlip flip = make_flip(
          a, b, work.adjacency.has(a, b) ? EdgeFlip::Dir::remove : EdgeFlip::Dir::add);
      work = apply_flip(work, flip);
      used_pairs.insert({a, b});
      result.flips.push_back(flip);
      result.step_kinds.push_back(0);
    } else {
      work.features(target, best_f) = work.features(target, best_f) == 1.0 ? 0.0 : 1.0;
      refresh_m_row(m, work.features, surrogate.weight, target);
      used_feats.insert(best_f);
      result.feature_flips.push_back({target, best_f});
      result.step_kinds.push_back(1);
    }
    cur_margin = margin_of(local_logits(work.adjacency, m, target, surrogate.hops), y);
    result.loss_trace.push_back(-cur_margin);
  }
  result.perturbed = std::move(work);
  return result;
}

void save_attack_result(const std::string& path, const AttackHeader& header,
                        const AttackResult& result) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), "save_attack_result: cannot open " + path);
  out << "# graphacl attack result v1\n";
  out << "dataset " << header.dataset << "\n";
  out << "seed " << header.seed << "\n";
  out << "budget " << header.budget << "\n";
  out << "objective " << header.objective << "\n";
  const size_t steps = result.loss_trace.size();
  detail::require(result.step_kinds.size() == steps &&
                      result.flips.size() + result.feature_flips.size() == steps,
                  "save_attack_result: inconsistent step bookkeeping");
  out << "flips " << steps << "\n";
  char buf[64];
  size_t ei = 0, fi = 0;
  for (size_t t = 0; t < steps; ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", result.loss_trace[t]);
    if (result.step_kinds[t] == 0) {
      const EdgeFlip& f = result.flips[ei++];
      out << (t + 1) << " " << f.i << " " << f.j << " "
          << (f.direction == EdgeFlip::Dir::add ? "add" : "remove") << " " << buf << "\n";
    } else {
      const FeatureFlip& f = result.feature_flips[fi++];
      out << (t + 1) << " " << f.node << " " << f.feature << " flip " << buf << "\n";
    }
  }
  out.close();
  detail::require(static_cast<bool>(out), "save_attack_result: write failed for " + path);
}

AttackResult replay_attack(const std::string& path, const AttributedGraph& base,
                           AttackHeader* header) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open attack result");
  AttackHeader h;
  int declared = -1;
  std::string line;
  int lineno = 0;
  while (declared < 0 && std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "dataset") {
      ss >> h.dataset;
    } else if (key == "seed") {
      if (!(ss >> h.seed)) throw ParseError(path, lineno, "bad seed");
    } else if (key == "budget") {
      if (!(ss >> h.budget)) throw ParseError(path, lineno, "bad budget");
    } else if (key == "objective") {
      ss >> h.objective;
    } else if (key == "flips") {
      if (!(ss >> declared) || declared < 0) throw ParseError(path, lineno, "bad flip count");
    } else {
      throw ParseError(path, lineno, "unknown header field '" + key + "'");
    }
  }
  if (declared < 0) throw ParseError(path, lineno, "missing 'flips' count");

  AttackResult result;
  result.perturbed = base;
  for (int t = 0; t < declared; ++t) {
    if (!std::getline(in, line)) throw ParseError(path, lineno, "truncated flip list");
    ++lineno;
    std::istringstream ss(line);
    int step, a, b;
    std::string kind;
    double loss;
    if (!(ss >> step >> a >> b >> kind >> loss))
      throw ParseError(path, lineno, "malformed flip line");
    if (step != t + 1) throw ParseError(path, lineno, "flip steps out of order");
    try {
      if (kind == "add" || kind == "remove") {
        const EdgeFlip flip =
            make_flip(a, b, kind == "add" ? EdgeFlip::Dir::add : EdgeFlip::Dir::remove);
        result.perturbed = apply_flip(result.perturbed, flip);
        result.flips.push_back(flip);
        result.step_kinds.push_back(0);
      } else if (kind == "flip") {
        if (a < 0 || a >= base.n() || b < 0 || b >= base.dim())
          throw ParseError(path, lineno, "feature flip out of range");
        double& v = result.perturbed.features(a, b);
        if (v != 0.0 && v != 1.0) throw ParseError(path, lineno, "feature not boolean");
        v = v == 1.0 ? 0.0 : 1.0;
        result.feature_flips.push_back({a, b});
        result.step_kinds.push_back(1);
      } else {
        throw ParseError(path, lineno, "unknown flip kind '" + kind + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, std::string("flip not applicable: ") + e.what());
    }
    result.loss_trace.push_back(loss);
  }
  if (header) *header = h;
  return result;
}

}  // namespace graphacl
