#pragma once

#include <string>

#include "graphacl/contrastive.hpp"

namespace graphacl {

// Linearized GCN surrogate: logits = A-hat^hops X W, class probabilities by
// row softmax. Linear in W, so cross-entropy training is convex and the
// gradient w.r.t. A-hat is exact.
struct SurrogateModel {
  DenseMatrix weight;  // D x k
  int hops = 2;
  void validate() const {
    detail::require(weight.is_finite(), "SurrogateModel: non-finite weight");
    detail::require(hops >= 1, "SurrogateModel: hops must be >= 1");
  }
};

struct SurrogateConfig {
  int epochs = 100;
  double lr = 0.5;
  int hops = 2;
  // Attack objective over all nodes with self-training labels (default) or
  // over train nodes only.
  bool objective_train_only = false;
};

struct FeatureFlip {
  int node = 0;
  int feature = 0;
};

struct AttackResult {
  AttributedGraph perturbed;
  std::vector<EdgeFlip> flips;
  std::vector<FeatureFlip> feature_flips;  // targeted attack only
  // Per-step kind (0 = edge, 1 = feature), preserving the interleaving of the
  // two flip lists; aligned with loss_trace.
  std::vector<uint8_t> step_kinds;
  // Attack objective after each applied perturbation. Across surrogate
  // refreshes the trace accumulates per-step deltas, so it stays strictly
  // increasing for the maximizing attacks; the targeted attack records
  // -margin, which is non-decreasing.
  std::vector<double> loss_trace;
};

// W starts at zero (uniform logits, per-node loss ln k) and follows
// full-batch gradient descent on masked cross-entropy. The trajectory is
// deterministic; `seed` is accepted for interface uniformity.
SurrogateModel train_surrogate(const AttributedGraph& g, int epochs, double lr, uint64_t seed,
                               int hops = 2);

// Logits of A-hat^hops X W for every node.
DenseMatrix surrogate_logits(const SurrogateModel& s, const AttributedGraph& g);
// Argmax per row, ties to the lowest class id.
std::vector<int> surrogate_predictions(const SurrogateModel& s, const AttributedGraph& g);

// Mean negative log-likelihood over masked nodes. `grad_logits`, when given,
// receives the softmax-cross-entropy gradient w.r.t. the logits (zero on
// unmasked rows).
double cross_entropy(const DenseMatrix& probs, const std::vector<int>& labels,
                     const std::vector<uint8_t>& mask, DenseMatrix* grad_logits = nullptr);

// The supervised attack objective at an explicit normalized adjacency:
// cross-entropy of A-hat^hops X W over (labels, mask), optionally with the
// factored dLoss/dA-hat. The greedy attack and the gradient checker share
// this path.
double surrogate_objective(const SurrogateModel& s, const SparseMatrix& a_hat,
                           const DenseMatrix& x, const std::vector<int>& labels,
                           const std::vector<uint8_t>& mask, AhatFactors* factors = nullptr);

struct ScoredFlip {
  EdgeFlip flip;
  double score = 0.0;
};

// Chains dL/dA-hat (factored) through the D^{-1/2}(A+I)D^{-1/2}
// normalization:
//   dL/dA_ij = G_ij / sqrt(d_i d_j) - rowcol_i / (2 d_i),
//   score(i, j) = (1 - 2 A_ij) * (dL/dA_ij + dL/dA_ji),
// with d the A+I degrees and rowcol_i the A-hat-weighted sum of row and
// column i of G. Returns every candidate scored, sorted by descending score,
// ties by (i, j).
std::vector<ScoredFlip> structure_gradient(const AhatFactors& grad, const AttributedGraph& g,
                                           const SparseMatrix& a_hat,
                                           const std::vector<std::pair<int, int>>& candidates);

// ceil(rate * |E|): the flip budget for a perturbation rate.
int flips_for_rate(const AttributedGraph& g, double rate);

// Greedy gradient attack maximizing surrogate cross-entropy (self-training
// labels by default). The surrogate is retrained on the perturbed graph every
// `retrain_every` flips (0 = never). Each applied flip must strictly increase
// the exact objective or the attack halts early.
AttackResult supervised_attack(const AttributedGraph& g, const PerturbationBudget& budget,
                               const SurrogateConfig& cfg, uint64_t seed, int retrain_every = 10,
                               int score_batch = 1);

// Greedy gradient attack maximizing the crossed contrastive terms (Eq. 18
// estimate) against fixed encoders; never reads labels.
AttackResult unsupervised_attack(const AttributedGraph& g, const EncoderParams& f1,
                                 const EncoderParams& f2, const DiscriminatorParams& d,
                                 const PerturbationBudget& budget, uint64_t seed,
                                 int score_batch = 1);

// Greedy targeted attack on one node: each step exactly evaluates every edge
// flip incident to the target and every boolean feature flip on the target,
// and applies the candidate minimizing the surrogate margin
// (true-class logit - best other logit). Halts early if no candidate keeps
// the margin non-increasing. Fully deterministic; `seed` is accepted for
// interface uniformity.
AttackResult targeted_attack(const AttributedGraph& g, int target, int n_perturbations,
                             const SurrogateModel& surrogate, uint64_t seed,
                             int min_degree_floor = 1);

// Margin of `target` under the surrogate on graph `g`.
double surrogate_margin(const SurrogateModel& s, const AttributedGraph& g, int target);

struct AttackHeader {
  std::string dataset;
  std::string objective;
  uint64_t seed = 0;
  int budget = 0;
};

// Text round-trip: header, then one line per perturbation
// ("step i j add|remove loss" or "step node feat flip loss").
void save_attack_result(const std::string& path, const AttackHeader& header,
                        const AttackResult& result);
// Re-applies a saved attack to `base`; validates flip applicability.
AttackResult replay_attack(const std::string& path, const AttributedGraph& base,
                           AttackHeader* header = nullptr);

}  // namespace graphacl
