#include "graphacl/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "graphacl/attack.hpp"
#include "graphacl/dataset_io.hpp"
#include "graphacl/encoder.hpp"
#include "graphacl/numerics.hpp"
#include "graphacl/rng.hpp"
#include "json.hpp"

namespace graphacl {

Method method_from_string(const std::string& s) {
  if (s == "gcn") return Method::gcn;
  if (s == "dgi") return Method::dgi;
  if (s == "gcl") return Method::gcl;
  if (s == "graphacl") return Method::graphacl;
  throw std::invalid_argument("unknown method '" + s + "'");
}

std::string method_to_string(Method m) {
  switch (m) {
    case Method::gcn: return "gcn";
    case Method::dgi: return "dgi";
    case Method::gcl: return "gcl";
    case Method::graphacl: return "graphacl";
  }
  throw std::invalid_argument("unknown method value");
}

std::vector<int> TargetSelection::all() const {
  std::vector<int> out = high_margin;
  out.insert(out.end(), low_margin.begin(), low_margin.end());
  out.insert(out.end(), random.begin(), random.end());
  return out;
}

void TargetSelection::validate() const {
  detail::require(high_margin.size() == 10 && low_margin.size() == 10 && random.size() == 20,
                  "TargetSelection: counts must be 10/10/20");
  const std::vector<int> ids = all();
  detail::require(std::set<int>(ids.begin(), ids.end()).size() == ids.size(),
                  "TargetSelection: duplicate target");
}

void EvalConfig::validate() const {
  pretrain.validate();
  gcn.validate();
  detail::require(graphacl_rate >= 0.0 && graphacl_rate <= 1.0 && gcl_rate >= 0.0 &&
                      gcl_rate <= 1.0,
                  "EvalConfig: rates outside [0, 1]");
  detail::require(attack_score_batch >= 1, "EvalConfig: attack_score_batch must be >= 1");
  detail::require(surrogate_retrain_every >= 0,
                  "EvalConfig: surrogate_retrain_every must be >= 0");
}

namespace {

int argmax_row(const double* p, int k) {
  int best = 0;
  for (int c = 1; c < k; ++c)
    if (p[c] > p[best]) best = c;
  return best;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return {mean, std::sqrt(var / n)};
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

TargetSelection select_targets(const AttributedGraph& g, const GcnModel& selector, uint64_t seed) {
  detail::require(g.has_labels() && g.has_masks(), "select_targets: labels and masks required");
  const DenseMatrix logits = gcn_logits(selector, g);

  struct Entry {
    int id;
    double margin;
    bool correct;
  };
  std::vector<Entry> test;
  for (int i = 0; i < g.n(); ++i) {
    if (!g.test_mask[i]) continue;
    const int y = g.labels[i];
    detail::require(y >= 0 && y < logits.cols, "select_targets: unlabeled test node");
    double other = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < logits.cols; ++c)
      if (c != y) other = std::max(other, logits(i, c));
    test.push_back({i, logits(i, y) - other, argmax_row(logits.row(i), logits.cols) == y});
  }
  detail::require(test.size() >= 40, "select_targets: need at least 40 test nodes");

  std::vector<Entry> correct;
  for (const Entry& e : test)
    if (e.correct) correct.push_back(e);
  detail::require(correct.size() >= 20,
                  "select_targets: need at least 20 correctly classified test nodes");

  TargetSelection sel;
  std::sort(correct.begin(), correct.end(), [](const Entry& a, const Entry& b) {
    return a.margin != b.margin ? a.margin > b.margin : a.id < b.id;
  });
  for (int i = 0; i < 10; ++i) sel.high_margin.push_back(correct[i].id);
  std::sort(correct.begin() + 10, correct.end(), [](const Entry& a, const Entry& b) {
    return a.margin != b.margin ? a.margin < b.margin : a.id < b.id;
  });
  for (int i = 10; i < 20; ++i) sel.low_margin.push_back(correct[i].id);

  std::set<int> taken(sel.high_margin.begin(), sel.high_margin.end());
  taken.insert(sel.low_margin.begin(), sel.low_margin.end());
  std::vector<int> pool;
  for (const Entry& e : test)
    if (!taken.count(e.id)) pool.push_back(e.id);

  Rng rng = sub_rng(seed, "probe");
  const std::vector<int> perm = rng.permutation(static_cast<int>(pool.size()));
  for (int i = 0; i < 20; ++i) sel.random.push_back(pool[perm[i]]);
  std::sort(sel.random.begin(), sel.random.end());
  sel.validate();
  return sel;
}

// ---------------------------------------------------------------------------
// Victims: a trained model plus whatever the fast per-node predictor needs.

namespace {

struct Victim {
  Method method = Method::gcn;
  GcnModel gcn;
  TrainedModel enc;
  ProbeResult probe;
  DenseMatrix prod1;  // training features times the first-layer weight
};

const DenseMatrix& first_weight(const Victim& v) {
  return v.method == Method::gcn ? v.gcn.w1 : v.enc.f1.weights.front();
}

TrainConfig pretrain_config(Method m, const EvalConfig& cfg, uint64_t seed) {
  TrainConfig pc = cfg.pretrain;
  pc.seed = seed;
  switch (m) {
    case Method::dgi:
      pc.mode = AugmentationMode::none;
      pc.adv_rate = 0.0;
      break;
    case Method::gcl:
      pc.mode = AugmentationMode::random_drop;
      pc.adv_rate = cfg.gcl_rate;
      break;
    case Method::graphacl:
      pc.mode = AugmentationMode::unsupervised_adv;
      pc.adv_rate = cfg.graphacl_rate;
      break;
    case Method::gcn:
      throw std::invalid_argument("gcn is not a pre-trained method");
  }
  return pc;
}

Victim train_victim(Method m, const AttributedGraph& g, uint64_t seed, const EvalConfig& cfg) {
  Victim v;
  v.method = m;
  if (m == Method::gcn) {
    TrainConfig gc = cfg.gcn;
    gc.seed = seed;
    v.gcn = train_gcn_supervised(g, gc);
  } else {
    v.enc = train_graphacl(g, pretrain_config(m, cfg, seed));
    const EncoderOutput out = encode(v.enc.f1, normalize_adjacency(g), g.features);
    v.probe = linear_probe(out.z, g.labels, g.train_mask, g.test_mask, g.num_classes, cfg.probe);
  }
  v.prod1 = matmul(g.features, first_weight(v));
  return v;
}

std::vector<int> victim_predictions(const Victim& v, const AttributedGraph& g) {
  if (v.method == Method::gcn) return gcn_predict(v.gcn, g);
  const EncoderOutput out = encode(v.enc.f1, normalize_adjacency(g), g.features);
  const DenseMatrix logits = matmul(out.z, v.probe.weights);
  std::vector<int> preds(g.n());
  for (int i = 0; i < g.n(); ++i) preds[i] = argmax_row(logits.row(i), logits.cols);
  return preds;
}

// Prediction for one node on a graph whose features may differ from the
// victim's training features only in row `node` (the targeted-attack
// surface), letting the cached first-layer product be reused.
int victim_predict_node(const Victim& v, const AttributedGraph& g, int node) {
  const SparseMatrix a_hat = normalize_adjacency(g);
  DenseMatrix prod = v.prod1;
  const DenseMatrix& w = first_weight(v);
  double* pr = prod.row(node);
  std::fill(pr, pr + prod.cols, 0.0);
  for (int f = 0; f < g.dim(); ++f) {
    const double a = g.features(node, f);
    if (a != 0.0) axpy(a, w.row(f), pr, prod.cols);
  }

  if (v.method == Method::gcn) {
    DenseMatrix h1 = spmm(a_hat, prod);
    for (double& x : h1.data) x = x > 0.0 ? x : 0.0;
    const DenseMatrix m2 = matmul(h1, v.gcn.w2);
    std::vector<double> logits(m2.cols, 0.0);
    for (int e = a_hat.offs[node]; e < a_hat.offs[node + 1]; ++e)
      axpy(a_hat.vals[e], m2.row(a_hat.idx[e]), logits.data(), m2.cols);
    return argmax_row(logits.data(), static_cast<int>(logits.size()));
  }

  const EncoderOutput out = encode_from_prod1(v.enc.f1, a_hat, std::move(prod));
  const DenseMatrix& pw = v.probe.weights;
  std::vector<double> logits(pw.cols, 0.0);
  for (int j = 0; j < pw.rows; ++j) axpy(out.z(node, j), pw.row(j), logits.data(), pw.cols);
  return argmax_row(logits.data(), static_cast<int>(logits.size()));
}

// Applies the first `steps` recorded perturbations in place. Every step is a
// toggle on a distinct edge pair or feature cell, so applying the same prefix
// twice restores the graph exactly.
void toggle_prefix(AttributedGraph& g, const AttackResult& r, int steps) {
  int ei = 0, fi = 0;
  for (int s = 0; s < steps; ++s) {
    if (r.step_kinds[s] == 0) {
      const EdgeFlip& f = r.flips[ei++];
      g.adjacency = toggle_pair(g.adjacency, f.i, f.j);
    } else {
      const FeatureFlip& f = r.feature_flips[fi++];
      double& cell = g.features(f.node, f.feature);
      cell = cell == 0.0 ? 1.0 : 0.0;
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Targeted protocol.

ExperimentReport evaluate_targeted(const AttributedGraph& g, Method method,
                                   const TargetSelection& targets, const std::vector<int>& levels,
                                   EvalSetting setting, const std::vector<uint64_t>& seeds,
                                   const EvalConfig& cfg, TargetedDetail* detail_out) {
  cfg.validate();
  targets.validate();
  detail::require(g.has_labels() && g.has_masks(), "evaluate_targeted: labels and masks required");
  detail::require(!levels.empty(), "evaluate_targeted: levels must be non-empty");
  for (int l : levels)
    detail::require(l >= 0 && l <= 4, "evaluate_targeted: levels must lie in 0..4");
  detail::require(!seeds.empty(), "evaluate_targeted: seeds must be non-empty");

  const std::vector<int> nodes = targets.all();
  for (int t : nodes)
    detail::require(t >= 0 && t < g.n() && g.labels[t] >= 0,
                    "evaluate_targeted: target out of range or unlabeled");

  // The greedy attacks are deterministic, so one run at the deepest level
  // serves every seed; shallower levels are step prefixes of it.
  const int max_level = *std::max_element(levels.begin(), levels.end());
  std::vector<AttackResult> attacks;
  if (max_level > 0) {
    const SurrogateConfig scfg;
    const uint64_t attack_seed = derive_seed(seeds.front(), "attack");
    const SurrogateModel sur = train_surrogate(g, scfg.epochs, scfg.lr, attack_seed, scfg.hops);
    attacks.reserve(nodes.size());
    for (int t : nodes) attacks.push_back(targeted_attack(g, t, max_level, sur, attack_seed, 1));
  }

  const bool retrain_encoder = cfg.poison_retrain_encoder || method == Method::gcn;
  std::vector<std::vector<double>> acc(seeds.size(), std::vector<double>(levels.size(), 0.0));
  AttributedGraph work = g;

  for (size_t si = 0; si < seeds.size(); ++si) {
    const Victim clean = train_victim(method, g, seeds[si], cfg);
    const std::vector<int> clean_pred = victim_predictions(clean, g);
    for (size_t li = 0; li < levels.size(); ++li) {
      const int level = levels[li];
      int correct = 0;
      if (level == 0) {
        for (int t : nodes) correct += clean_pred[t] == g.labels[t];
      } else {
        for (size_t ti = 0; ti < nodes.size(); ++ti) {
          const int t = nodes[ti];
          const int steps = std::min<int>(level, static_cast<int>(attacks[ti].step_kinds.size()));
          toggle_prefix(work, attacks[ti], steps);
          int pred;
          if (setting == EvalSetting::evasive) {
            pred = victim_predict_node(clean, work, t);
          } else if (retrain_encoder) {
            const Victim poisoned = train_victim(method, work, seeds[si], cfg);
            pred = victim_predict_node(poisoned, work, t);
          } else {
            Victim poisoned = clean;
            const EncoderOutput out =
                encode(poisoned.enc.f1, normalize_adjacency(work), work.features);
            poisoned.probe = linear_probe(out.z, work.labels, work.train_mask, work.test_mask,
                                          work.num_classes, cfg.probe);
            poisoned.prod1 = matmul(work.features, first_weight(poisoned));
            pred = victim_predict_node(poisoned, work, t);
          }
          correct += pred == g.labels[t];
          toggle_prefix(work, attacks[ti], steps);  // restore
        }
      }
      acc[si][li] = static_cast<double>(correct) / static_cast<double>(nodes.size());
    }
  }

  ExperimentReport rep;
  for (size_t li = 0; li < levels.size(); ++li) {
    std::vector<double> per_seed(seeds.size());
    for (size_t si = 0; si < seeds.size(); ++si) per_seed[si] = acc[si][li];
    const auto [mean, sd] = mean_std(per_seed);
    std::string label = "clean";
    if (levels[li] > 0)
      label = setting == EvalSetting::evasive ? "evasive"
              : retrain_encoder               ? "poisoning"
                                              : "poisoning-probe";
    rep.rows.push_back({cfg.dataset, method_to_string(method), label,
                        static_cast<double>(levels[li]), mean, sd,
                        static_cast<int>(seeds.size())});
  }
  if (detail_out) {
    detail_out->levels = levels;
    detail_out->accuracy = acc;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Metattack protocol.

MetattackGraphs make_metattack_graphs(const AttributedGraph& g, const std::vector<double>& rates,
                                      uint64_t seed, const EvalConfig& cfg) {
  cfg.validate();
  detail::require(!rates.empty(), "make_metattack_graphs: rates must be non-empty");
  MetattackGraphs mg;
  mg.rates = rates;
  for (double r : rates) {
    detail::require(r >= 0.0 && r <= 0.5, "metattack: rate outside [0, 0.5]");
    if (r == 0.0) {
      mg.graphs.emplace_back();
      continue;
    }
    PerturbationBudget budget;
    budget.max_flips = flips_for_rate(g, r);
    budget.policy = PerturbationBudget::Policy::all_pairs;
    budget.min_degree_floor = 1;
    mg.graphs.push_back(supervised_attack(g, budget, SurrogateConfig{}, seed,
                                          cfg.surrogate_retrain_every, cfg.attack_score_batch)
                            .perturbed);
  }
  return mg;
}

ExperimentReport evaluate_metattack(const AttributedGraph& g, Method method, double train_adv_rate,
                                    const MetattackGraphs& eval_graphs,
                                    const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                                    MetattackDetail* detail_out) {
  cfg.validate();
  detail::require(method == Method::dgi || method == Method::graphacl,
                  "evaluate_metattack: method must be dgi or graphacl");
  detail::require(g.has_labels() && g.has_masks(),
                  "evaluate_metattack: labels and masks required");
  detail::require(!seeds.empty(), "evaluate_metattack: seeds must be non-empty");
  detail::require(train_adv_rate >= 0.0 && train_adv_rate <= 0.5,
                  "evaluate_metattack: train rate outside [0, 0.5]");
  detail::require(eval_graphs.graphs.size() == eval_graphs.rates.size(),
                  "evaluate_metattack: malformed eval graphs");
  const std::vector<double>& rates = eval_graphs.rates;
  detail::require(!rates.empty(), "evaluate_metattack: eval rates must be non-empty");

  std::vector<SparseMatrix> a_hats(rates.size());
  for (size_t ri = 0; ri < rates.size(); ++ri)
    if (rates[ri] > 0.0) a_hats[ri] = normalize_adjacency(eval_graphs.graphs[ri]);

  const std::string label = method == Method::dgi
                                ? std::string("dgi")
                                : "graphacl-" + fmt("%.3f", train_adv_rate);

  std::vector<std::vector<double>> acc(seeds.size(), std::vector<double>(rates.size(), 0.0));
  for (size_t si = 0; si < seeds.size(); ++si) {
    TrainConfig pc = cfg.pretrain;
    pc.seed = seeds[si];
    pc.mode =
        method == Method::dgi ? AugmentationMode::none : AugmentationMode::unsupervised_adv;
    pc.adv_rate = method == Method::dgi ? 0.0 : train_adv_rate;
    const TrainedModel model = train_graphacl(g, pc);
    const EncoderOutput clean_out = encode(model.f1, normalize_adjacency(g), g.features);
    const ProbeResult probe = linear_probe(clean_out.z, g.labels, g.train_mask, g.test_mask,
                                           g.num_classes, cfg.probe);
    for (size_t ri = 0; ri < rates.size(); ++ri) {
      if (rates[ri] == 0.0) {
        acc[si][ri] = probe.accuracy;
        continue;
      }
      // The attack only rewires edges, so the clean first-layer product is
      // still exact on the perturbed graph.
      const EncoderOutput out = encode_from_prod1(model.f1, a_hats[ri], clean_out.prod.front());
      const DenseMatrix logits = matmul(out.z, probe.weights);
      int correct = 0, total = 0;
      for (int i = 0; i < g.n(); ++i) {
        if (!g.test_mask[i]) continue;
        ++total;
        correct += argmax_row(logits.row(i), logits.cols) == g.labels[i];
      }
      acc[si][ri] = static_cast<double>(correct) / static_cast<double>(total);
    }
  }

  ExperimentReport rep;
  for (size_t ri = 0; ri < rates.size(); ++ri) {
    std::vector<double> per_seed(seeds.size());
    for (size_t si = 0; si < seeds.size(); ++si) per_seed[si] = acc[si][ri];
    const auto [mean, sd] = mean_std(per_seed);
    rep.rows.push_back({cfg.dataset, label, rates[ri] == 0.0 ? "clean" : "evasive", rates[ri],
                        mean, sd, static_cast<int>(seeds.size())});
  }
  if (detail_out) {
    detail_out->rates = rates;
    detail_out->accuracy = acc;
  }
  return rep;
}

ExperimentReport evaluate_metattack(const AttributedGraph& g, Method method, double train_adv_rate,
                                    const std::vector<double>& eval_rates,
                                    const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                                    MetattackDetail* detail_out) {
  detail::require(!seeds.empty(), "evaluate_metattack: seeds must be non-empty");
  const MetattackGraphs graphs =
      make_metattack_graphs(g, eval_rates, derive_seed(seeds.front(), "attack"), cfg);
  return evaluate_metattack(g, method, train_adv_rate, graphs, seeds, cfg, detail_out);
}

ExperimentReport rate_sweep(const AttributedGraph& g, const std::vector<double>& rates,
                            const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                            const std::string& plot_path, const std::vector<double>& eval_rates) {
  detail::require(!rates.empty(), "rate_sweep: rates must be non-empty");
  detail::require(!seeds.empty(), "rate_sweep: seeds must be non-empty");
  const MetattackGraphs graphs =
      make_metattack_graphs(g, eval_rates, derive_seed(seeds.front(), "attack"), cfg);

  ExperimentReport rep;
  std::string plot = "rate,setting,level,seed,accuracy\n";
  for (double rate : rates) {
    MetattackDetail det;
    const ExperimentReport one =
        evaluate_metattack(g, Method::graphacl, rate, graphs, seeds, cfg, &det);
    rep.rows.insert(rep.rows.end(), one.rows.begin(), one.rows.end());
    for (size_t si = 0; si < seeds.size(); ++si)
      for (size_t ri = 0; ri < det.rates.size(); ++ri) {
        char line[160];
        std::snprintf(line, sizeof line, "%g,%s,%g,%llu,%.6f\n", rate,
                      det.rates[ri] == 0.0 ? "clean" : "evasive", det.rates[ri],
                      static_cast<unsigned long long>(seeds[si]), det.accuracy[si][ri]);
        plot += line;
      }
  }

  if (!plot_path.empty()) {
    std::ofstream out(plot_path);
    if (!out) throw ParseError(plot_path, 0, "cannot open file for writing");
    out << plot;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Report files.

namespace {

constexpr const char* kReportHeader = "dataset,method,setting,level,acc_mean,acc_std,n_seeds";

void check_row(const ReportRow& r) {
  const auto clean_field = [](const std::string& s) {
    return !s.empty() && s.find(',') == std::string::npos && s.find('\n') == std::string::npos;
  };
  detail::require(clean_field(r.dataset) && clean_field(r.method) && clean_field(r.setting),
                  "report: fields must be non-empty and free of commas/newlines");
  detail::require(r.acc_mean >= 0.0 && r.acc_mean <= 1.0, "report: mean outside [0, 1]");
  detail::require(r.acc_std >= 0.0, "report: negative std");
  detail::require(r.n_seeds >= 1, "report: n_seeds must be >= 1");
}

}  // namespace

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << kReportHeader << '\n';
  for (const ReportRow& r : report.rows) {
    check_row(r);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%g,%.6f,%.6f,%d\n", r.dataset.c_str(),
                  r.method.c_str(), r.setting.c_str(), r.level, r.acc_mean, r.acc_std, r.n_seeds);
    out << buf;
  }
}

ExperimentReport read_report_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open report");
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader)
    throw ParseError(path, 1, "bad report header");

  const auto number = [&](const std::string& tok, int lineno) {
    try {
      size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ParseError(path, lineno, "bad number '" + tok + "'");
    }
  };

  ExperimentReport rep;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> tok;
    std::stringstream ss(line);
    std::string piece;
    while (std::getline(ss, piece, ',')) tok.push_back(piece);
    if (tok.size() != 7) throw ParseError(path, lineno, "expected 7 columns");
    ReportRow r;
    r.dataset = tok[0];
    r.method = tok[1];
    r.setting = tok[2];
    r.level = number(tok[3], lineno);
    r.acc_mean = number(tok[4], lineno);
    r.acc_std = number(tok[5], lineno);
    const double seeds = number(tok[6], lineno);
    r.n_seeds = static_cast<int>(seeds);
    if (static_cast<double>(r.n_seeds) != seeds)
      throw ParseError(path, lineno, "n_seeds must be an integer");
    try {
      check_row(r);
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, lineno, e.what());
    }
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

void write_report_json(const ExperimentReport& report, const std::string& path) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ReportRow& r : report.rows) {
    check_row(r);
    rows.push_back({{"dataset", r.dataset},
                    {"method", r.method},
                    {"setting", r.setting},
                    {"level", r.level},
                    {"acc_mean", r.acc_mean},
                    {"acc_std", r.acc_std},
                    {"n_seeds", r.n_seeds}});
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << nlohmann::json{{"rows", std::move(rows)}}.dump(2) << '\n';
}

ExperimentReport read_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open report");
  ExperimentReport rep;
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    for (const nlohmann::json& row : j.at("rows")) {
      ReportRow r;
      r.dataset = row.at("dataset").get<std::string>();
      r.method = row.at("method").get<std::string>();
      r.setting = row.at("setting").get<std::string>();
      r.level = row.at("level").get<double>();
      r.acc_mean = row.at("acc_mean").get<double>();
      r.acc_std = row.at("acc_std").get<double>();
      r.n_seeds = row.at("n_seeds").get<int>();
      check_row(r);
      rep.rows.push_back(std::move(r));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path, 0, e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 0, e.what());
  }
  return rep;
}

}  // namespace graphacl
