#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphacl/graph.hpp"
#include "graphacl/training.hpp"

namespace graphacl {

// Victim families the robustness protocols compare.
enum class Method { gcn, dgi, gcl, graphacl };
Method method_from_string(const std::string& s);
std::string method_to_string(Method m);

enum class EvalSetting { evasive, poisoning };

// The 40 attack targets: confidently classified, barely classified, random.
struct TargetSelection {
  std::vector<int> high_margin;  // 10, highest classification margin, all correct
  std::vector<int> low_margin;   // 10, lowest margin but still correct
  std::vector<int> random;       // 20, uniform over the remaining test nodes

  std::vector<int> all() const;  // concatenation, high -> low -> random
  void validate() const;
};

// Picks targets among test nodes using the selector's margins
// (true-class logit minus best other logit); ties break toward lower ids.
// The random 20 come from the "probe" stream of `seed`.
TargetSelection select_targets(const AttributedGraph& g, const GcnModel& selector, uint64_t seed);

struct ReportRow {
  std::string dataset;
  std::string method;
  std::string setting;  // clean | evasive | poisoning | poisoning-probe
  double level = 0.0;   // perturbation count (targeted) or rate (metattack)
  double acc_mean = 0.0;
  double acc_std = 0.0;
  int n_seeds = 0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
};

// CSV: `dataset,method,setting,level,acc_mean,acc_std,n_seeds`, LF endings,
// accuracies at six decimals. JSON keeps full double precision.
void write_report_csv(const ExperimentReport& report, const std::string& path);
ExperimentReport read_report_csv(const std::string& path);
void write_report_json(const ExperimentReport& report, const std::string& path);
ExperimentReport read_report_json(const std::string& path);

// Shared knobs for the protocols. `pretrain` seeds/modes are overridden per
// method and per evaluation seed; `gcn` drives both the supervised victim and
// the target-selection model.
struct EvalConfig {
  std::string dataset = "synth";
  TrainConfig pretrain;
  TrainConfig gcn;
  ProbeConfig probe;
  double graphacl_rate = 0.03;  // adversarial-view rate for graphacl victims
  double gcl_rate = 0.2;        // random edge-drop rate for gcl victims
  int attack_score_batch = 8;   // batched flips per metattack scan
  int surrogate_retrain_every = 10;
  // Poisoning for pre-trained methods: retrain the encoder (true) or only the
  // probe (false). Reports label the latter rows "poisoning-probe".
  bool poison_retrain_encoder = true;

  EvalConfig() {
    gcn.learning_rate = 1e-2;
    gcn.weight_decay = 5e-4;
    gcn.embedding_dim = 16;
    gcn.patience = 30;
  }
  void validate() const;
};

// Per-seed, per-level target accuracies behind the aggregated rows.
struct TargetedDetail {
  std::vector<int> levels;
  std::vector<std::vector<double>> accuracy;  // [seed][level]
};

// Nettack-style protocol: greedily attack each target with `level`
// perturbations (levels in 0..4; 0 = clean), then measure the fraction of
// targets still classified correctly. Evasive victims train once on the clean
// graph; poisoning retrains per perturbed graph. Attacks are deterministic
// and shared across seeds.
ExperimentReport evaluate_targeted(const AttributedGraph& g, Method method,
                                   const TargetSelection& targets, const std::vector<int>& levels,
                                   EvalSetting setting, const std::vector<uint64_t>& seeds,
                                   const EvalConfig& cfg, TargetedDetail* detail = nullptr);

// Globally perturbed evaluation graphs, one per rate, generated once by the
// supervised attack and shared across methods and seeds.
struct MetattackGraphs {
  std::vector<double> rates;
  std::vector<AttributedGraph> graphs;  // aligned with rates; rate 0 slot unused
};
MetattackGraphs make_metattack_graphs(const AttributedGraph& g, const std::vector<double>& rates,
                                      uint64_t seed, const EvalConfig& cfg);

struct MetattackDetail {
  std::vector<double> rates;
  std::vector<std::vector<double>> accuracy;  // [seed][rate]
};

// Global evasive protocol: pretrain (dgi or graphacl at `train_adv_rate`),
// fit a probe on clean-graph embeddings, then score the full test mask on
// each perturbed graph's embeddings. Rates above 0.5 are rejected.
ExperimentReport evaluate_metattack(const AttributedGraph& g, Method method, double train_adv_rate,
                                    const MetattackGraphs& eval_graphs,
                                    const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                                    MetattackDetail* detail = nullptr);
ExperimentReport evaluate_metattack(const AttributedGraph& g, Method method, double train_adv_rate,
                                    const std::vector<double>& eval_rates,
                                    const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                                    MetattackDetail* detail = nullptr);

// One metattack evaluation per training rate (rate 0 reduces to DGI).
// `plot_path`, when non-empty, receives long-format per-seed rows
// `rate,setting,level,seed,accuracy` for external plotting.
ExperimentReport rate_sweep(const AttributedGraph& g, const std::vector<double>& rates,
                            const std::vector<uint64_t>& seeds, const EvalConfig& cfg,
                            const std::string& plot_path,
                            const std::vector<double>& eval_rates = {0.0, 0.05, 0.2});

}  // namespace graphacl
