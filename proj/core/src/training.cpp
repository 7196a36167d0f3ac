#include "graphacl/training.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "graphacl/dataset_io.hpp"

namespace graphacl {

AugmentationMode augmentation_mode_from_string(const std::string& s) {
  if (s == "none") return AugmentationMode::none;
  if (s == "supervised-adv") return AugmentationMode::supervised_adv;
  if (s == "unsupervised-adv") return AugmentationMode::unsupervised_adv;
  if (s == "random-drop") return AugmentationMode::random_drop;
  throw std::invalid_argument("unknown augmentation mode '" + s + "'");
}

std::string to_string(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::none: return "none";
    case AugmentationMode::supervised_adv: return "supervised-adv";
    case AugmentationMode::unsupervised_adv: return "unsupervised-adv";
    case AugmentationMode::random_drop: return "random-drop";
  }
  throw std::invalid_argument("unknown augmentation mode value");
}

void TrainConfig::validate() const {
  detail::require(epochs >= 1, "TrainConfig: epochs must be >= 1");
  detail::require(learning_rate > 0.0 && std::isfinite(learning_rate),
                  "TrainConfig: bad learning rate");
  detail::require(weight_decay >= 0.0 && std::isfinite(weight_decay),
                  "TrainConfig: bad weight decay");
  detail::require(embedding_dim >= 1, "TrainConfig: embedding dim must be >= 1");
  detail::require(layers == 1 || layers == 2, "TrainConfig: layers must be 1 or 2");
  detail::require(adv_rate >= 0.0 && adv_rate <= 1.0, "TrainConfig: adv rate outside [0, 1]");
  detail::require(attack_refresh_every >= 1, "TrainConfig: refresh cadence must be >= 1");
  weights.validate();
}

void write_train_config(const std::string& path, const TrainConfig& cfg) {
  std::ofstream out(path);
  detail::require(static_cast<bool>(out), "write_train_config: cannot open " + path);
  char buf[64];
  auto put_f = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << key << "=" << buf << "\n";
  };
  out << "epochs=" << cfg.epochs << "\n";
  put_f("learning_rate", cfg.learning_rate);
  put_f("weight_decay", cfg.weight_decay);
  out << "embedding_dim=" << cfg.embedding_dim << "\n";
  out << "layers=" << cfg.layers << "\n";
  put_f("alpha", cfg.weights.alpha);
  put_f("beta", cfg.weights.beta);
  out << "mode=" << to_string(cfg.mode) << "\n";
  put_f("adv_rate", cfg.adv_rate);
  out << "attack_refresh_every=" << cfg.attack_refresh_every << "\n";
  out << "patience=" << cfg.patience << "\n";
  out << "seed=" << cfg.seed << "\n";
  out.close();
  detail::require(static_cast<bool>(out), "write_train_config: write failed for " + path);
}

namespace {

template <class T>
T parse_number(const std::string& path, int lineno, const std::string& value) {
  std::istringstream ss(value);
  T out;
  char rest;
  if (!(ss >> out) || ss >> rest) throw ParseError(path, lineno, "malformed value '" + value + "'");
  return out;
}

}  // namespace

TrainConfig read_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open config");
  TrainConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(path, lineno, "expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "epochs") {
      cfg.epochs = parse_number<int>(path, lineno, value);
    } else if (key == "learning_rate") {
      cfg.learning_rate = parse_number<double>(path, lineno, value);
    } else if (key == "weight_decay") {
      cfg.weight_decay = parse_number<double>(path, lineno, value);
    } else if (key == "embedding_dim") {
      cfg.embedding_dim = parse_number<int>(path, lineno, value);
    } else if (key == "layers") {
      cfg.layers = parse_number<int>(path, lineno, value);
    } else if (key == "alpha") {
      cfg.weights.alpha = parse_number<double>(path, lineno, value);
    } else if (key == "beta") {
      cfg.weights.beta = parse_number<double>(path, lineno, value);
    } else if (key == "mode") {
      try {
        cfg.mode = augmentation_mode_from_string(value);
      } catch (const std::invalid_argument& e) {
        throw ParseError(path, lineno, e.what());
      }
    } else if (key == "adv_rate") {
      cfg.adv_rate = parse_number<double>(path, lineno, value);
    } else if (key == "attack_refresh_every") {
      cfg.attack_refresh_every = parse_number<int>(path, lineno, value);
    } else if (key == "patience") {
      cfg.patience = parse_number<int>(path, lineno, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<uint64_t>(path, lineno, value);
    } else {
      throw ParseError(path, lineno, "unknown config key '" + key + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, lineno, e.what());
  }
  return cfg;
}

AdamOptimizer::AdamOptimizer(double lr, double weight_decay) : lr_(lr), wd_(weight_decay) {
  detail::require(lr > 0.0 && std::isfinite(lr), "Adam: bad learning rate");
  detail::require(weight_decay >= 0.0, "Adam: negative weight decay");
}

void AdamOptimizer::step(const std::vector<std::pair<double*, const double*>>& tensors,
                         const std::vector<size_t>& sizes) {
  detail::require(tensors.size() == sizes.size(), "Adam: tensor/size list mismatch");
  size_t total = 0;
  for (size_t s : sizes) total += s;
  if (m_.empty()) {
    m_.assign(total, 0.0);
    v_.assign(total, 0.0);
  }
  detail::require(m_.size() == total, "Adam: parameter layout changed between steps");
  ++t_;
  const double bc1 = 1.0 - std::pow(0.9, t_);
  const double bc2 = 1.0 - std::pow(0.999, t_);
  size_t off = 0;
  for (size_t k = 0; k < tensors.size(); ++k) {
    double* p = tensors[k].first;
    const double* gr = tensors[k].second;
    for (size_t i = 0; i < sizes[k]; ++i) {
      const double g = gr[i] + wd_ * p[i];
      double& m = m_[off + i];
      double& v = v_[off + i];
      m = 0.9 * m + 0.1 * g;
      v = 0.999 * v + 0.001 * g * g;
      p[i] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + 1e-8);
    }
    off += sizes[k];
  }
}

namespace {

std::vector<int> encoder_dims(int in_dim, const TrainConfig& cfg) {
  if (cfg.layers == 1) return {in_dim, cfg.embedding_dim};
  return {in_dim, cfg.embedding_dim, cfg.embedding_dim};
}

struct EncoderSlots {
  std::vector<std::pair<double*, const double*>> tensors;
  std::vector<size_t> sizes;
  void add(EncoderParams& p, const std::vector<DenseMatrix>& gw, const std::vector<double>& gs) {
    for (size_t l = 0; l < p.weights.size(); ++l) {
      tensors.push_back({p.weights[l].data.data(), gw[l].data.data()});
      sizes.push_back(p.weights[l].data.size());
    }
    tensors.push_back({p.slopes.data(), gs.data()});
    sizes.push_back(p.slopes.size());
  }
  void add(DiscriminatorParams& d, const DenseMatrix& gd) {
    tensors.push_back({d.w.data.data(), gd.data.data()});
    sizes.push_back(d.w.data.size());
  }
};

struct BestState {
  double loss = std::numeric_limits<double>::infinity();
  int epoch = 0;
  EncoderParams f1, f2;
  DiscriminatorParams d;
  int stale = 0;

  // Returns true when patience is exhausted.
  bool update(double loss_now, int epoch_now, const EncoderParams& f1_now,
              const EncoderParams* f2_now, const DiscriminatorParams& d_now, int patience) {
    if (loss_now < loss) {
      loss = loss_now;
      epoch = epoch_now;
      f1 = f1_now;
      if (f2_now) f2 = *f2_now;
      d = d_now;
      stale = 0;
    } else {
      ++stale;
    }
    return patience > 0 && stale >= patience;
  }
};

}  // namespace

TrainedModel train_graphacl(const AttributedGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  if (cfg.mode == AugmentationMode::supervised_adv)
    detail::require(g.has_labels() && g.has_masks(),
                    "train_graphacl: supervised-adv mode needs labels and masks");

  const int budget_flips = flips_for_rate(g, cfg.adv_rate);
  const bool attack_mode = cfg.mode == AugmentationMode::supervised_adv ||
                           cfg.mode == AugmentationMode::unsupervised_adv;
  const bool reduced = cfg.mode == AugmentationMode::none ||
                       (cfg.weights.alpha == 0.0 && cfg.weights.beta == 0.0) ||
                       (attack_mode && budget_flips == 0);

  Rng init = sub_rng(cfg.seed, "init");
  Rng corruption = sub_rng(cfg.seed, "corruption");
  Rng attack = sub_rng(cfg.seed, "attack");

  TrainedModel model;
  model.config = cfg;
  model.f1 = init_encoder(encoder_dims(g.dim(), cfg), init);
  if (!reduced) model.f2 = init_encoder(encoder_dims(g.dim(), cfg), init);
  model.has_f2 = !reduced;
  model.d = init_discriminator(cfg.embedding_dim, init);

  const SparseMatrix a_hat = normalize_adjacency(g);
  AdamOptimizer adam(cfg.learning_rate, cfg.weight_decay);
  BestState best;

  if (reduced) {
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      const uint64_t corruption_seed = corruption.next_u64();
      const DgiResult res = dgi_loss(model.f1, model.d, g, a_hat, corruption_seed);
      model.loss_history.push_back(res.loss);
      const bool stop =
          best.update(res.loss, epoch, model.f1, nullptr, model.d, cfg.patience);
      EncoderSlots slots;
      slots.add(model.f1, res.f_weights, res.f_slopes);
      slots.add(model.d, res.d_w);
      adam.step(slots.tensors, slots.sizes);
      if (stop) break;
    }
    model.f1 = best.f1;
    model.d = best.d;
    model.best_epoch = best.epoch;
    return model;
  }

  PerturbationBudget budget;
  budget.max_flips = budget_flips;
  AttributedGraph g_adv;
  SparseMatrix a_hat_adv;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch % cfg.attack_refresh_every == 0) {
      const uint64_t attack_seed = attack.next_u64();
      switch (cfg.mode) {
        case AugmentationMode::supervised_adv:
          g_adv = supervised_attack(g, budget, SurrogateConfig{}, attack_seed,
                                    /*retrain_every=*/10, /*score_batch=*/8)
                      .perturbed;
          break;
        case AugmentationMode::unsupervised_adv:
          g_adv = unsupervised_attack(g, model.f1, model.f2, model.d, budget, attack_seed,
                                      /*score_batch=*/8)
                      .perturbed;
          break;
        case AugmentationMode::random_drop:
          g_adv = random_edge_drop(g, cfg.adv_rate, attack_seed);
          break;
        case AugmentationMode::none:
          break;  // unreachable: reduced path
      }
      a_hat_adv = normalize_adjacency(g_adv);
    }

    const uint64_t corruption_seed = corruption.next_u64();
    CompositeOptions opt;
    opt.a_hat_g = &a_hat;
    opt.a_hat_adv = &a_hat_adv;
    opt.features_hint = FeatureAlias::Same;  // structure-only views
    const CompositeResult res =
        cfg.mode == AugmentationMode::supervised_adv
            ? graphacl_supervised_loss(model.f1, &model.f2, model.d, g, g_adv, cfg.weights,
                                       corruption_seed, opt)
            : graphacl_unsupervised_loss(model.f1, &model.f2, model.d, g, g_adv, cfg.weights,
                                         corruption_seed, opt);
    model.loss_history.push_back(res.report.total);
    const bool stop =
        best.update(res.report.total, epoch, model.f1, &model.f2, model.d, cfg.patience);
    EncoderSlots slots;
    slots.add(model.f1, res.f1_weights, res.f1_slopes);
    slots.add(model.f2, res.f2_weights, res.f2_slopes);
    slots.add(model.d, res.d_w);
    adam.step(slots.tensors, slots.sizes);
    if (stop) break;
  }
  model.f1 = best.f1;
  model.f2 = best.f2;
  model.d = best.d;
  model.best_epoch = best.epoch;
  return model;
}

TrainedModel train_dgi(const AttributedGraph& g, TrainConfig cfg) {
  cfg.mode = AugmentationMode::none;
  cfg.weights = LossWeights{0.0, 0.0};
  return train_graphacl(g, cfg);
}

namespace {

DenseMatrix relu(const DenseMatrix& x) {
  DenseMatrix out = x;
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return out;
}

double mask_accuracy(const DenseMatrix& logits, const std::vector<int>& labels,
                     const std::vector<uint8_t>& mask) {
  int correct = 0, total = 0;
  for (int i = 0; i < logits.rows; ++i) {
    if (!mask[i]) continue;
    int best = 0;
    for (int c = 1; c < logits.cols; ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    correct += best == labels[i];
    ++total;
  }
  detail::require(total > 0, "accuracy: empty mask");
  return static_cast<double>(correct) / total;
}

}  // namespace

GcnModel train_gcn_supervised(const AttributedGraph& g, const TrainConfig& cfg) {
  cfg.validate();
  detail::require(g.has_labels() && g.has_masks(), "train_gcn_supervised: labels/masks required");
  detail::require(g.num_classes >= 2, "train_gcn_supervised: need at least two classes");

  Rng init = sub_rng(cfg.seed, "init");
  GcnModel model;
  model.w1 = glorot(g.dim(), cfg.embedding_dim, init);
  model.w2 = DenseMatrix(cfg.embedding_dim, g.num_classes);  // zero: initial loss is ln k

  const SparseMatrix a_hat = normalize_adjacency(g);
  AdamOptimizer adam(cfg.learning_rate, cfg.weight_decay);
  const bool have_val = std::count(g.val_mask.begin(), g.val_mask.end(), 1) > 0;

  GcnModel snapshot = model;
  double best_acc = -1.0;
  int best_epoch = 0, stale = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const DenseMatrix u1 = spmm(a_hat, matmul(g.features, model.w1));
    const DenseMatrix h = relu(u1);
    const DenseMatrix logits = spmm(a_hat, matmul(h, model.w2));
    DenseMatrix dlogits;
    const double loss = cross_entropy(softmax_rows(logits), g.labels, g.train_mask, &dlogits);
    model.loss_history.push_back(loss);

    if (have_val) {
      const double acc = mask_accuracy(logits, g.labels, g.val_mask);
      if (acc > best_acc) {
        best_acc = acc;
        best_epoch = epoch;
        snapshot.w1 = model.w1;
        snapshot.w2 = model.w2;
        stale = 0;
      } else if (cfg.patience > 0 && ++stale >= cfg.patience) {
        break;
      }
    }

    const DenseMatrix dp2 = spmm(a_hat, dlogits);  // A-hat symmetric
    const DenseMatrix dw2 = matmul_tn(h, dp2);
    DenseMatrix du1 = matmul_nt(dp2, model.w2);
    for (size_t i = 0; i < du1.data.size(); ++i)
      if (u1.data[i] <= 0.0) du1.data[i] = 0.0;
    const DenseMatrix dw1 = matmul_tn(g.features, spmm(a_hat, du1));

    adam.step({{model.w1.data.data(), dw1.data.data()}, {model.w2.data.data(), dw2.data.data()}},
              {model.w1.data.size(), model.w2.data.size()});
  }

  if (have_val) {
    snapshot.loss_history = std::move(model.loss_history);
    snapshot.val_accuracy = best_acc;
    snapshot.best_epoch = best_epoch;
    return snapshot;
  }
  model.best_epoch = static_cast<int>(model.loss_history.size()) - 1;
  return model;
}

DenseMatrix gcn_logits(const GcnModel& m, const AttributedGraph& g) {
  detail::require(m.w1.rows == g.dim(), "gcn_logits: feature dim mismatch");
  const SparseMatrix a_hat = normalize_adjacency(g);
  return spmm(a_hat, matmul(relu(spmm(a_hat, matmul(g.features, m.w1))), m.w2));
}

std::vector<int> gcn_predict(const GcnModel& m, const AttributedGraph& g) {
  const DenseMatrix logits = gcn_logits(m, g);
  std::vector<int> pred(g.n());
  for (int i = 0; i < logits.rows; ++i) {
    int best = 0;
    for (int c = 1; c < logits.cols; ++c)
      if (logits(i, c) > logits(i, best)) best = c;
    pred[i] = best;
  }
  return pred;
}

ProbeResult linear_probe(const DenseMatrix& embeddings, const std::vector<int>& labels,
                         const std::vector<uint8_t>& train_mask,
                         const std::vector<uint8_t>& test_mask, int num_classes,
                         const ProbeConfig& cfg) {
  const int n = embeddings.rows;
  const int h = embeddings.cols;
  detail::require(h >= 1, "linear_probe: embeddings need at least one dimension");
  detail::require(num_classes >= 2, "linear_probe: need at least two classes");
  detail::require(static_cast<int>(labels.size()) == n &&
                      static_cast<int>(train_mask.size()) == n &&
                      static_cast<int>(test_mask.size()) == n,
                  "linear_probe: labels/mask length mismatch");
  detail::require(std::count(train_mask.begin(), train_mask.end(), 1) > 0,
                  "linear_probe: empty train mask");
  detail::require(std::count(test_mask.begin(), test_mask.end(), 1) > 0,
                  "linear_probe: empty test mask");
  detail::require(cfg.epochs >= 1 && cfg.learning_rate > 0.0 && cfg.l2 >= 0.0,
                  "linear_probe: bad config");

  ProbeResult res;
  res.weights = DenseMatrix(h, num_classes);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const DenseMatrix probs = softmax_rows(matmul(embeddings, res.weights));
    DenseMatrix dlogits;
    cross_entropy(probs, labels, train_mask, &dlogits);
    const DenseMatrix dw = matmul_tn(embeddings, dlogits);
    for (size_t i = 0; i < res.weights.data.size(); ++i)
      res.weights.data[i] -=
          cfg.learning_rate * (dw.data[i] + cfg.l2 * res.weights.data[i]);
  }
  res.accuracy = mask_accuracy(matmul(embeddings, res.weights), labels, test_mask);
  return res;
}

}  // namespace graphacl
