#pragma once

#include <string>

#include "graphacl/attack.hpp"

namespace graphacl {

enum class AugmentationMode { none, supervised_adv, unsupervised_adv, random_drop };

// Spelled none | supervised-adv | unsupervised-adv | random-drop.
AugmentationMode augmentation_mode_from_string(const std::string& s);
std::string to_string(AugmentationMode mode);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  int embedding_dim = 64;
  int layers = 1;
  LossWeights weights;  // alpha, beta
  AugmentationMode mode = AugmentationMode::none;
  // Attack budget as a fraction of |E| (drop probability for random-drop).
  double adv_rate = 0.0;
  int attack_refresh_every = 20;  // epochs between adversarial-view refreshes
  int patience = 20;              // early stop; <= 0 disables
  uint64_t seed = 0;

  void validate() const;
};

// Flat key=value round trip; unknown keys and malformed values are ParseErrors.
TrainConfig read_train_config(const std::string& path);
void write_train_config(const std::string& path, const TrainConfig& cfg);

struct TrainedModel {
  EncoderParams f1;
  EncoderParams f2;  // meaningful only when has_f2
  bool has_f2 = false;
  DiscriminatorParams d;
  std::vector<double> loss_history;  // one entry per epoch actually run
  int best_epoch = 0;                // epoch of the restored (lowest-loss) state
  TrainConfig config;
};

// Algorithm: refresh the adversarial view every attack_refresh_every epochs
// (supervised_attack, unsupervised_attack against the current encoders, or
// random edge drop), then take one Adam step on the composite contrastive
// loss. With mode none, alpha=beta=0, or a resolved attack budget of 0 flips,
// this reduces to DGI bit-for-bit: the same parameter draws, corruption
// stream, loss arithmetic, and updates.
TrainedModel train_graphacl(const AttributedGraph& g, const TrainConfig& cfg);

// train_graphacl with mode none and alpha = beta = 0 forced.
TrainedModel train_dgi(const AttributedGraph& g, TrainConfig cfg);

struct GcnModel {
  DenseMatrix w1, w2;  // D x h, h x k
  std::vector<double> loss_history;
  double val_accuracy = 0.0;
  int best_epoch = 0;
};

// Two-layer GCN classifier: logits = A-hat relu(A-hat X W1) W2, trained by
// Adam on train-mask cross-entropy. W2 starts at zero, so the initial loss is
// exactly ln k. Early-stops on validation accuracy when a val mask is present,
// restoring the best weights.
GcnModel train_gcn_supervised(const AttributedGraph& g, const TrainConfig& cfg);
DenseMatrix gcn_logits(const GcnModel& m, const AttributedGraph& g);
std::vector<int> gcn_predict(const GcnModel& m, const AttributedGraph& g);

struct ProbeConfig {
  int epochs = 300;
  double learning_rate = 0.5;
  double l2 = 1e-4;
};

struct ProbeResult {
  DenseMatrix weights;  // h x k
  double accuracy = 0.0;  // on the test mask
};

// Multinomial logistic regression on frozen embeddings: zero-initialized,
// full-batch gradient descent with L2, deterministic.
ProbeResult linear_probe(const DenseMatrix& embeddings, const std::vector<int>& labels,
                         const std::vector<uint8_t>& train_mask,
                         const std::vector<uint8_t>& test_mask, int num_classes,
                         const ProbeConfig& cfg = {});

// Adam over a flat list of parameter tensors, bias-corrected, with decoupled
// L2 folded into the gradient (g += wd * p).
class AdamOptimizer {
 public:
  AdamOptimizer(double lr, double weight_decay = 0.0);
  // Registration order defines state layout; call with the same tensors in
  // the same order every step.
  void step(const std::vector<std::pair<double*, const double*>>& tensors,
            const std::vector<size_t>& sizes);

 private:
  double lr_, wd_;
  int t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace graphacl
