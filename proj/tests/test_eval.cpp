#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "graphacl/dataset_io.hpp"
#include "graphacl/encoder.hpp"
#include "graphacl/eval.hpp"
#include "graphacl/numerics.hpp"
#include "graphacl/rng.hpp"
#include "graphacl/synth.hpp"
#include "graphacl/training.hpp"

using namespace graphacl;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

AttributedGraph eval_graph() {
  SynthSpec s;
  s.name = "eval-toy";
  s.nodes = 220;
  s.dim = 48;
  s.classes = 4;
  s.target_edges = 440;
  s.train_per_class = 5;
  s.val_count = 30;
  s.test_count = 60;
  s.topic_purity = 0.9;
  s.homophily = 0.85;
  s.words_per_node = 12;
  s.seed = 7;
  return synth_planetoid(s);
}

EvalConfig toy_config() {
  EvalConfig cfg;
  cfg.dataset = "eval-toy";
  cfg.pretrain.epochs = 60;
  cfg.pretrain.embedding_dim = 16;
  cfg.pretrain.learning_rate = 5e-3;
  cfg.pretrain.attack_refresh_every = 20;
  cfg.pretrain.patience = 15;
  cfg.gcn.epochs = 60;
  cfg.gcn.patience = 15;
  cfg.attack_score_batch = 4;
  return cfg;
}

GcnModel toy_selector(const AttributedGraph& g, const EvalConfig& cfg) {
  TrainConfig gc = cfg.gcn;
  gc.seed = 0;
  return train_gcn_supervised(g, gc);
}

ExperimentReport sample_report() {
  ExperimentReport rep;
  rep.rows.push_back({"cora", "gcn", "clean", 0.0, 0.8025, 0.0125, 5});
  rep.rows.push_back({"cora", "graphacl-0.030", "evasive", 0.05, 0.73, 1.0 / 3.0, 5});
  rep.rows.push_back({"citeseer", "dgi", "poisoning", 3.0, 0.55, 0.0, 2});
  return rep;
}

bool rows_close(const ReportRow& a, const ReportRow& b, double tol) {
  return a.dataset == b.dataset && a.method == b.method && a.setting == b.setting &&
         a.level == b.level && std::abs(a.acc_mean - b.acc_mean) <= tol &&
         std::abs(a.acc_std - b.acc_std) <= tol && a.n_seeds == b.n_seeds;
}

}  // namespace

TEST_CASE("method names round trip and reject junk") {
  for (Method m : {Method::gcn, Method::dgi, Method::gcl, Method::graphacl})
    CHECK(method_from_string(method_to_string(m)) == m);
  CHECK_THROWS_AS(method_from_string("gat"), std::invalid_argument);
}

TEST_CASE("select_targets returns disjoint 10/10/20 correct-margin picks") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const GcnModel selector = toy_selector(g, cfg);

  const TargetSelection sel = select_targets(g, selector, 5);
  CHECK(sel.high_margin.size() == 10);
  CHECK(sel.low_margin.size() == 10);
  CHECK(sel.random.size() == 20);
  sel.validate();

  const std::vector<int> preds = gcn_predict(selector, g);
  for (int t : sel.high_margin) CHECK(preds[t] == g.labels[t]);
  for (int t : sel.low_margin) CHECK(preds[t] == g.labels[t]);
  for (int t : sel.all()) CHECK(g.test_mask[t] == 1);

  // Highest margins really dominate the low-margin picks.
  const DenseMatrix logits = gcn_logits(selector, g);
  const auto margin = [&](int i) {
    double other = -1e300;
    for (int c = 0; c < logits.cols; ++c)
      if (c != g.labels[i]) other = std::max(other, logits(i, c));
    return logits(i, g.labels[i]) - other;
  };
  double min_high = 1e300, max_low = -1e300;
  for (int t : sel.high_margin) min_high = std::min(min_high, margin(t));
  for (int t : sel.low_margin) max_low = std::max(max_low, margin(t));
  CHECK(min_high >= max_low);

  const TargetSelection again = select_targets(g, selector, 5);
  CHECK(again.all() == sel.all());
  const TargetSelection other = select_targets(g, selector, 6);
  CHECK(other.high_margin == sel.high_margin);  // margins do not depend on the seed
  CHECK(other.random != sel.random);
}

TEST_CASE("select_targets needs 40 test nodes") {
  SynthSpec s;
  s.name = "tiny";
  s.nodes = 120;
  s.dim = 32;
  s.classes = 4;
  s.target_edges = 240;
  s.train_per_class = 5;
  s.val_count = 10;
  s.test_count = 30;
  s.words_per_node = 8;
  s.seed = 3;
  const AttributedGraph g = synth_planetoid(s);
  const GcnModel selector = toy_selector(g, toy_config());
  CHECK_THROWS_AS(select_targets(g, selector, 0), std::invalid_argument);
}

TEST_CASE("report CSV round trips and stays stable") {
  const ExperimentReport rep = sample_report();
  const std::string path = temp_path("graphacl_report.csv");
  write_report_csv(rep, path);

  const ExperimentReport back = read_report_csv(path);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (size_t i = 0; i < rep.rows.size(); ++i)
    CHECK(rows_close(back.rows[i], rep.rows[i], 5e-7));  // six written decimals

  // Re-writing the parsed report reproduces the file byte for byte.
  const std::string path2 = temp_path("graphacl_report2.csv");
  write_report_csv(back, path2);
  std::ifstream a(path), b(path2);
  const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(sa.find("\r") == std::string::npos);

  write_report_csv(ExperimentReport{}, path);
  std::ifstream empty(path);
  std::string line;
  CHECK(std::getline(empty, line));
  CHECK(line == "dataset,method,setting,level,acc_mean,acc_std,n_seeds");
  CHECK_FALSE(std::getline(empty, line));
  CHECK(read_report_csv(path).rows.empty());
}

TEST_CASE("report CSV rejects malformed files") {
  const std::string path = temp_path("graphacl_report_bad.csv");
  const auto write_text = [&](const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
  };

  CHECK_THROWS_AS(read_report_csv(temp_path("graphacl_report_missing.csv")), ParseError);
  write_text("dataset,method\n");
  CHECK_THROWS_AS(read_report_csv(path), ParseError);
  write_text("dataset,method,setting,level,acc_mean,acc_std,n_seeds\ncora,gcn,clean,0\n");
  CHECK_THROWS_AS(read_report_csv(path), ParseError);
  write_text("dataset,method,setting,level,acc_mean,acc_std,n_seeds\ncora,gcn,clean,0,x,0,5\n");
  CHECK_THROWS_AS(read_report_csv(path), ParseError);
  write_text(
      "dataset,method,setting,level,acc_mean,acc_std,n_seeds\ncora,gcn,clean,0,1.5,0,5\n");
  CHECK_THROWS_AS(read_report_csv(path), ParseError);
  write_text(
      "dataset,method,setting,level,acc_mean,acc_std,n_seeds\ncora,gcn,clean,0,0.5,0,2.5\n");
  CHECK_THROWS_AS(read_report_csv(path), ParseError);

  ExperimentReport bad = sample_report();
  bad.rows[0].dataset = "co,ra";
  CHECK_THROWS_AS(write_report_csv(bad, path), std::invalid_argument);
}

TEST_CASE("report JSON round trips exactly") {
  const ExperimentReport rep = sample_report();
  const std::string path = temp_path("graphacl_report.json");
  write_report_json(rep, path);
  const ExperimentReport back = read_report_json(path);
  REQUIRE(back.rows.size() == rep.rows.size());
  for (size_t i = 0; i < rep.rows.size(); ++i)
    CHECK(rows_close(back.rows[i], rep.rows[i], 0.0));  // doubles survive JSON

  const std::string bad = temp_path("graphacl_report_bad.json");
  std::ofstream(bad) << "{\"rows\": [{\"dataset\": 3}]}";
  CHECK_THROWS_AS(read_report_json(bad), ParseError);
  std::ofstream(bad) << "not json";
  CHECK_THROWS_AS(read_report_json(bad), ParseError);
}

TEST_CASE("targeted: level 0 matches across settings and seeds quantize to 1/40") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const TargetSelection sel = select_targets(g, toy_selector(g, cfg), 5);
  const std::vector<uint64_t> seeds{1, 2};
  const std::vector<int> levels{0, 1};

  for (Method m : {Method::gcn, Method::dgi}) {
    TargetedDetail evasive, poison;
    const ExperimentReport re =
        evaluate_targeted(g, m, sel, levels, EvalSetting::evasive, seeds, cfg, &evasive);
    const ExperimentReport rp =
        evaluate_targeted(g, m, sel, levels, EvalSetting::poisoning, seeds, cfg, &poison);

    REQUIRE(re.rows.size() == 2);
    CHECK(re.rows[0].setting == "clean");
    CHECK(re.rows[1].setting == "evasive");
    CHECK(rp.rows[0].setting == "clean");
    CHECK(rp.rows[1].setting == "poisoning");
    CHECK(re.rows[0].method == method_to_string(m));

    for (size_t si = 0; si < seeds.size(); ++si) {
      CHECK(evasive.accuracy[si][0] == poison.accuracy[si][0]);
      for (size_t li = 0; li < levels.size(); ++li) {
        const double scaled = evasive.accuracy[si][li] * 40.0;
        CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-12));
        CHECK(evasive.accuracy[si][li] >= 0.0);
        CHECK(evasive.accuracy[si][li] <= 1.0);
      }
    }
  }
}

TEST_CASE("targeted: aggregation matches an independent pass and reruns are bitwise") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const TargetSelection sel = select_targets(g, toy_selector(g, cfg), 5);
  const std::vector<uint64_t> seeds{1, 2, 3};
  const std::vector<int> levels{0, 2};

  TargetedDetail d1, d2;
  const ExperimentReport r1 =
      evaluate_targeted(g, Method::gcn, sel, levels, EvalSetting::evasive, seeds, cfg, &d1);
  const ExperimentReport r2 =
      evaluate_targeted(g, Method::gcn, sel, levels, EvalSetting::evasive, seeds, cfg, &d2);
  CHECK(d1.accuracy == d2.accuracy);  // evasive evaluation never mutates state

  for (size_t li = 0; li < levels.size(); ++li) {
    double mean = 0.0;
    for (size_t si = 0; si < seeds.size(); ++si) mean += d1.accuracy[si][li];
    mean /= static_cast<double>(seeds.size());
    double var = 0.0;
    for (size_t si = 0; si < seeds.size(); ++si)
      var += (d1.accuracy[si][li] - mean) * (d1.accuracy[si][li] - mean);
    const double sd = std::sqrt(var / static_cast<double>(seeds.size()));
    CHECK(r1.rows[li].acc_mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r1.rows[li].acc_std == doctest::Approx(sd).epsilon(1e-12));
    CHECK(r1.rows[li].level == static_cast<double>(levels[li]));
    CHECK(r1.rows[li].n_seeds == 3);
  }
}

TEST_CASE("targeted: gcl victims run and poisoning-probe is labeled") {
  const AttributedGraph g = eval_graph();
  EvalConfig cfg = toy_config();
  const TargetSelection sel = select_targets(g, toy_selector(g, cfg), 5);
  const std::vector<uint64_t> seeds{4};

  const ExperimentReport rows =
      evaluate_targeted(g, Method::gcl, sel, {0, 1}, EvalSetting::evasive, seeds, cfg, nullptr);
  CHECK(rows.rows[0].acc_mean >= 0.0);
  CHECK(rows.rows[1].acc_mean <= 1.0);
  CHECK(rows.rows[0].n_seeds == 1);

  cfg.poison_retrain_encoder = false;
  const ExperimentReport probe_rows =
      evaluate_targeted(g, Method::dgi, sel, {1}, EvalSetting::poisoning, seeds, cfg, nullptr);
  CHECK(probe_rows.rows[0].setting == "poisoning-probe");
  const ExperimentReport gcn_rows =
      evaluate_targeted(g, Method::gcn, sel, {1}, EvalSetting::poisoning, seeds, cfg, nullptr);
  CHECK(gcn_rows.rows[0].setting == "poisoning");  // the flag is moot for gcn
}

TEST_CASE("targeted rejects malformed calls") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const TargetSelection sel = select_targets(g, toy_selector(g, cfg), 5);

  CHECK_THROWS_AS(evaluate_targeted(g, Method::gcn, sel, {5}, EvalSetting::evasive, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_targeted(g, Method::gcn, sel, {-1}, EvalSetting::evasive, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_targeted(g, Method::gcn, sel, {}, EvalSetting::evasive, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_targeted(g, Method::gcn, sel, {1}, EvalSetting::evasive, {}, cfg),
                  std::invalid_argument);

  TargetSelection dup = sel;
  dup.random[0] = dup.high_margin[0];
  CHECK_THROWS_AS(evaluate_targeted(g, Method::gcn, dup, {1}, EvalSetting::evasive, {1}, cfg),
                  std::invalid_argument);
}

TEST_CASE("metattack: rate 0 is the clean probe and graphs are shared") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const std::vector<uint64_t> seeds{1, 2};
  const std::vector<double> eval_rates{0.0, 0.05};

  MetattackDetail det;
  const ExperimentReport rep =
      evaluate_metattack(g, Method::dgi, 0.0, eval_rates, seeds, cfg, &det);
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[0].setting == "clean");
  CHECK(rep.rows[0].level == 0.0);
  CHECK(rep.rows[1].setting == "evasive");
  CHECK(rep.rows[1].level == 0.05);
  CHECK(rep.rows[0].method == "dgi");

  // The clean column is exactly the probe accuracy of an independent run.
  for (size_t si = 0; si < seeds.size(); ++si) {
    TrainConfig pc = cfg.pretrain;
    pc.seed = seeds[si];
    const TrainedModel model = train_dgi(g, pc);
    const EncoderOutput out = encode(model.f1, normalize_adjacency(g), g.features);
    const ProbeResult probe =
        linear_probe(out.z, g.labels, g.train_mask, g.test_mask, g.num_classes, cfg.probe);
    CHECK(det.accuracy[si][0] == probe.accuracy);
  }
}

TEST_CASE("metattack rejects out-of-range rates and wrong methods") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  CHECK_THROWS_AS(evaluate_metattack(g, Method::dgi, 0.0, {0.6}, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_metattack(g, Method::graphacl, 0.7, {0.05}, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_metattack(g, Method::gcn, 0.0, {0.05}, {1}, cfg),
                  std::invalid_argument);
  CHECK_THROWS_AS(evaluate_metattack(g, Method::gcl, 0.0, {0.05}, {1}, cfg),
                  std::invalid_argument);
}

TEST_CASE("rate sweep: cartesian rows, DGI reduction at rate 0, plot CSV reparses") {
  const AttributedGraph g = eval_graph();
  const EvalConfig cfg = toy_config();
  const std::vector<uint64_t> seeds{1, 2};
  const std::vector<double> rates{0.0, 0.02};
  const std::vector<double> eval_rates{0.0, 0.05};
  const std::string plot_path = temp_path("graphacl_sweep_plot.csv");

  const ExperimentReport rep = rate_sweep(g, rates, seeds, cfg, plot_path, eval_rates);
  REQUIRE(rep.rows.size() == rates.size() * eval_rates.size());
  CHECK(rep.rows[0].method == "graphacl-0.000");
  CHECK(rep.rows[2].method == "graphacl-0.020");

  // Rate 0 reduces to DGI bit for bit (same graphs, same seeds).
  const MetattackGraphs graphs =
      make_metattack_graphs(g, eval_rates, derive_seed(seeds.front(), "attack"), cfg);
  const ExperimentReport dgi = evaluate_metattack(g, Method::dgi, 0.0, graphs, seeds, cfg);
  for (size_t ri = 0; ri < eval_rates.size(); ++ri) {
    CHECK(rep.rows[ri].acc_mean == dgi.rows[ri].acc_mean);
    CHECK(rep.rows[ri].acc_std == dgi.rows[ri].acc_std);
  }

  std::ifstream in(plot_path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "rate,setting,level,seed,accuracy");
  int data_lines = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++data_lines;
    std::stringstream ss(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ss, tok, ',')) fields.push_back(tok);
    REQUIRE(fields.size() == 5);
    const double acc = std::stod(fields[4]);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK((fields[1] == "clean" || fields[1] == "evasive"));
  }
  CHECK(data_lines ==
        static_cast<int>(rates.size() * seeds.size() * eval_rates.size()));
}
