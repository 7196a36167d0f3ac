// Command-line front end: train encoders, run gradient attacks, reproduce the
// robustness protocols, check gradients, and convert raw citation datasets.
//
// Every artifact-producing command writes a manifest.json into --out before
// the run starts (command echo, seed, dataset identity, resolved config,
// expected artifacts) and finalizes it with timings afterwards; the command
// exits nonzero if any promised artifact is missing.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "graphacl/attack.hpp"
#include "graphacl/dataset_io.hpp"
#include "graphacl/eval.hpp"
#include "graphacl/gradcheck.hpp"
#include "graphacl/rng.hpp"
#include "graphacl/synth.hpp"
#include "graphacl/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace graphacl;

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// List parsing ("1,2,3"). An empty string parses to an empty list so callers
// can reject it with a specific message.

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty() || !out.empty()) out.push_back(cur);
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& csv, const char* what, Parse parse) {
  std::vector<T> out;
  for (const std::string& tok : split_csv(csv)) {
    try {
      size_t used = 0;
      T v = parse(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt("bad %s entry '%s' in '%s'", what, tok.c_str(), csv.c_str()));
    }
  }
  return out;
}

std::vector<double> parse_doubles(const std::string& csv, const char* what) {
  return parse_list<double>(csv, what,
                            [](const std::string& t, size_t* u) { return std::stod(t, u); });
}

std::vector<int> parse_ints(const std::string& csv, const char* what) {
  return parse_list<int>(csv, what,
                         [](const std::string& t, size_t* u) { return std::stoi(t, u); });
}

std::vector<uint64_t> parse_u64s(const std::string& csv, const char* what) {
  return parse_list<uint64_t>(
      csv, what, [](const std::string& t, size_t* u) { return std::stoull(t, u); });
}

// ---------------------------------------------------------------------------
// Dataset resolution: "synth:cora" / "synth:citeseer" generate the built-in
// synthetic benchmarks in memory; anything else is a directory path, tried
// literally and then under $GRAPHACL_DATA.

struct DatasetRef {
  AttributedGraph graph;
  std::string name;  // short name used in reports and headers
  json meta;         // manifest "dataset" object
};

DatasetRef resolve_dataset(const std::string& spec) {
  DatasetRef ds;
  if (spec == "synth:cora" || spec == "synth:citeseer") {
    const SynthSpec ss = spec == "synth:cora" ? cora_like() : citeseer_like();
    ds.graph = synth_planetoid(ss);
    ds.name = ss.name;
    ds.meta = {{"name", spec}, {"synthetic", true}, {"checksum", "-"}};
    return ds;
  }
  fs::path dir = spec;
  std::string tried = dir.string();
  if (!fs::is_directory(dir)) {
    if (const char* root = std::getenv("GRAPHACL_DATA")) {
      fs::path alt = fs::path(root) / spec;
      tried += ", " + alt.string();
      if (fs::is_directory(alt)) dir = alt;
    }
  }
  if (!fs::is_directory(dir))
    throw std::runtime_error("dataset '" + spec + "' not found (tried: " + tried + ")");
  ds.graph = load_planetoid(dir.string());
  ds.name = dir.filename().string();
  if (ds.name.empty()) ds.name = dir.parent_path().filename().string();
  ds.meta = {{"name", ds.name},
             {"path", fs::absolute(dir).string()},
             {"checksum", fmt("%016llx",
                              static_cast<unsigned long long>(dataset_checksum(dir.string())))}};
  return ds;
}

// ---------------------------------------------------------------------------
// Manifest

struct Manifest {
  std::string command;
  uint64_t seed = 0;
  json dataset = json::object();
  json config = json::object();
  std::vector<std::string> artifacts;
  json timings = json::object();
};

void write_manifest(const fs::path& out_dir, const Manifest& m) {
  const json j = {{"command", m.command},   {"seed", m.seed},
                  {"dataset", m.dataset},   {"config", m.config},
                  {"artifacts", m.artifacts}, {"timings", m.timings}};
  const fs::path path = out_dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// Rewrites the manifest with timings and verifies every promised artifact
// landed. Returns the command exit code contribution (0 or 1).
int finalize_manifest(const fs::path& out_dir, Manifest& m, json timings) {
  m.timings = std::move(timings);
  write_manifest(out_dir, m);
  int rc = 0;
  for (const std::string& rel : m.artifacts) {
    if (!fs::exists(out_dir / rel)) {
      std::cerr << "error: expected artifact missing: " << (out_dir / rel).string() << "\n";
      rc = 1;
    }
  }
  return rc;
}

std::string command_echo(int argc, char** argv) {
  std::string s = fs::path(argv[0]).filename().string();
  for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
  return s;
}

// ---------------------------------------------------------------------------
// Work scheduling: a fixed item list run on `jobs` threads. Items write to
// distinct slots, so results are identical for any thread count; exceptions
// are rethrown in item order.

void parallel_for(int jobs, int n, const std::function<void(int)>& fn) {
  jobs = std::min(std::max(jobs, 1), std::max(n, 1));
  if (jobs <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Shared config plumbing

json train_config_json(const TrainConfig& c) {
  return {{"epochs", c.epochs},
          {"learning_rate", c.learning_rate},
          {"weight_decay", c.weight_decay},
          {"embedding_dim", c.embedding_dim},
          {"layers", c.layers},
          {"alpha", c.weights.alpha},
          {"beta", c.weights.beta},
          {"mode", to_string(c.mode)},
          {"adv_rate", c.adv_rate},
          {"attack_refresh_every", c.attack_refresh_every},
          {"patience", c.patience},
          {"seed", c.seed}};
}

AugmentationMode parse_adv_mode(const std::string& s) {
  if (s == "unsupervised") return AugmentationMode::unsupervised_adv;
  if (s == "supervised") return AugmentationMode::supervised_adv;
  return augmentation_mode_from_string(s);
}

void write_loss_curve(const fs::path& path, const std::vector<double>& losses) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "epoch,loss\n";
  for (size_t i = 0; i < losses.size(); ++i) out << fmt("%zu,%.17g\n", i, losses[i]);
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

// Combines single-seed reports (one per seed, identical row layout) into one
// aggregated report, matching the library's own multi-seed aggregation.
ExperimentReport merge_single_seed(const std::vector<ExperimentReport>& parts) {
  if (parts.empty()) return {};
  const size_t rows = parts.front().rows.size();
  ExperimentReport rep;
  for (size_t r = 0; r < rows; ++r) {
    const ReportRow& base = parts.front().rows[r];
    std::vector<double> per_seed;
    per_seed.reserve(parts.size());
    for (const ExperimentReport& p : parts) {
      if (p.rows.size() != rows || p.rows[r].method != base.method ||
          p.rows[r].setting != base.setting || p.rows[r].level != base.level)
        throw std::runtime_error("per-seed report rows disagree; cannot aggregate");
      per_seed.push_back(p.rows[r].acc_mean);
    }
    const auto [mean, sd] = mean_std(per_seed);
    ReportRow row = base;
    row.acc_mean = mean;
    row.acc_std = sd;
    row.n_seeds = static_cast<int>(parts.size());
    rep.rows.push_back(row);
  }
  return rep;
}

void print_report(const ExperimentReport& rep) {
  std::printf("%-14s %-16s %-16s %8s %9s %9s %8s\n", "dataset", "method", "setting", "level",
              "acc_mean", "acc_std", "n_seeds");
  for (const ReportRow& r : rep.rows)
    std::printf("%-14s %-16s %-16s %8g %9.4f %9.4f %8d\n", r.dataset.c_str(), r.method.c_str(),
                r.setting.c_str(), r.level, r.acc_mean, r.acc_std, r.n_seeds);
}

std::vector<uint64_t> resolve_seeds(const std::string& seeds_csv, bool seeds_given,
                                    uint64_t base_seed) {
  std::vector<uint64_t> seeds;
  if (seeds_given) {
    seeds = parse_u64s(seeds_csv, "seed");
  } else {
    for (uint64_t s = base_seed; s < base_seed + 5; ++s) seeds.push_back(s);
  }
  if (seeds.empty()) throw std::runtime_error("--seeds: at least one seed is required");
  return seeds;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string dataset, method, out, config_path;
  uint64_t seed = 0;
  int epochs = 0, dim = 0, layers = 0, refresh_every = 0, patience = 0;
  double lr = 0, weight_decay = 0, alpha = 0, beta = 0, adv_rate = 0;
  std::string adv_mode;
  CLI::Option *o_epochs = nullptr, *o_dim = nullptr, *o_layers = nullptr, *o_refresh = nullptr,
              *o_patience = nullptr, *o_lr = nullptr, *o_wd = nullptr, *o_alpha = nullptr,
              *o_beta = nullptr, *o_adv_rate = nullptr, *o_adv_mode = nullptr;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    const DatasetRef ds = resolve_dataset(dataset);
    const double t_load = seconds_since(t0);

    TrainConfig cfg;
    if (!config_path.empty()) cfg = read_train_config(config_path);
    if (*o_epochs) cfg.epochs = epochs;
    if (*o_dim) cfg.embedding_dim = dim;
    if (*o_layers) cfg.layers = layers;
    if (*o_refresh) cfg.attack_refresh_every = refresh_every;
    if (*o_patience) cfg.patience = patience;
    if (*o_lr) cfg.learning_rate = lr;
    if (*o_wd) cfg.weight_decay = weight_decay;
    if (*o_alpha) cfg.weights.alpha = alpha;
    if (*o_beta) cfg.weights.beta = beta;
    if (*o_adv_rate) cfg.adv_rate = adv_rate;
    if (*o_adv_mode) cfg.mode = parse_adv_mode(adv_mode);
    cfg.seed = seed;
    if (method == "graphacl" && cfg.mode == AugmentationMode::none) {
      cfg.mode = AugmentationMode::unsupervised_adv;
      if (cfg.adv_rate == 0.0) cfg.adv_rate = 0.03;
    }

    const fs::path out_dir = out;
    fs::create_directories(out_dir);
    Manifest m;
    m.command = cmdline;
    m.seed = seed;
    m.dataset = ds.meta;
    m.config = {{"method", method}, {"train", train_config_json(cfg)}};
    m.artifacts = {"model.ckpt", "model.ckpt.txt", "loss_curve.csv", "train_config.txt"};
    write_manifest(out_dir, m);

    const auto t1 = Clock::now();
    Checkpoint ckpt;
    std::vector<double> losses;
    TrainConfig echo = cfg;
    if (method == "gcn") {
      const GcnModel gm = train_gcn_supervised(ds.graph, cfg);
      ckpt.f1.weights = {gm.w1, gm.w2};
      ckpt.f1.slopes = {0.0, 0.0};
      losses = gm.loss_history;
      std::printf("gcn on %s: %zu epochs, best epoch %d, val accuracy %.4f\n", ds.name.c_str(),
                  losses.size(), gm.best_epoch, gm.val_accuracy);
    } else if (method == "dgi" || method == "graphacl") {
      const TrainedModel tm = method == "dgi" ? train_dgi(ds.graph, cfg)
                                              : train_graphacl(ds.graph, cfg);
      ckpt.f1 = tm.f1;
      if (tm.has_f2) ckpt.f2 = tm.f2;
      ckpt.d = tm.d;
      losses = tm.loss_history;
      echo = tm.config;
      std::printf("%s on %s: %zu epochs, best epoch %d, final loss %.6f\n", method.c_str(),
                  ds.name.c_str(), losses.size(), tm.best_epoch,
                  losses.empty() ? 0.0 : losses.back());
    } else {
      throw std::runtime_error("unknown method '" + method + "' (gcn, dgi, graphacl)");
    }
    const double t_train = seconds_since(t1);

    save_checkpoint((out_dir / "model.ckpt").string(), ckpt);
    write_loss_curve(out_dir / "loss_curve.csv", losses);
    write_train_config((out_dir / "train_config.txt").string(), echo);
    m.config["train"] = train_config_json(echo);

    std::printf("artifacts in %s\n", out_dir.string().c_str());
    return finalize_manifest(out_dir, m,
                             {{"load", t_load}, {"train", t_train}, {"total", seconds_since(t0)}});
  }
};

// ---------------------------------------------------------------------------
// attack

struct AttackArgs {
  std::string dataset, objective, out, checkpoint, targets_csv;
  uint64_t seed = 0;
  int budget = 0, target = -1, floor = 1, score_batch = 1, retrain_every = 10;
  int surrogate_epochs = 100, hops = 2;
  double rate = 0, surrogate_lr = 0.5;
  bool train_only = false;
  CLI::Option *o_budget = nullptr, *o_rate = nullptr, *o_target = nullptr;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    const DatasetRef ds = resolve_dataset(dataset);
    const double t_load = seconds_since(t0);

    int flips = budget;
    if (objective == "targeted") {
      if (*o_rate) throw std::runtime_error("targeted attack takes --budget, not --rate");
      if (!*o_target) throw std::runtime_error("targeted attack requires --target");
      if (!*o_budget) throw std::runtime_error("targeted attack requires --budget");
    } else if (objective == "supervised" || objective == "unsupervised") {
      if ((o_budget->count() > 0) == (o_rate->count() > 0))
        throw std::runtime_error("exactly one of --budget / --rate is required");
      if (*o_rate) flips = flips_for_rate(ds.graph, rate);
    } else {
      throw std::runtime_error("unknown objective '" + objective +
                               "' (supervised, unsupervised, targeted)");
    }

    PerturbationBudget pb;
    pb.max_flips = flips;
    pb.min_degree_floor = floor;
    if (!targets_csv.empty()) {
      pb.targets = parse_ints(targets_csv, "target");
      pb.policy = PerturbationBudget::Policy::incident_to_targets;
    }

    const fs::path out_dir = out;
    fs::create_directories(out_dir);
    Manifest m;
    m.command = cmdline;
    m.seed = seed;
    m.dataset = ds.meta;
    m.config = {{"objective", objective},
                {"budget", flips},
                {"min_degree_floor", floor},
                {"score_batch", score_batch},
                {"retrain_every", retrain_every},
                {"surrogate",
                 {{"epochs", surrogate_epochs},
                  {"lr", surrogate_lr},
                  {"hops", hops},
                  {"objective_train_only", train_only}}}};
    if (*o_target) m.config["target"] = target;
    if (!targets_csv.empty()) m.config["targets"] = pb.targets;
    if (!checkpoint.empty()) m.config["checkpoint"] = checkpoint;
    m.artifacts = {"attack.txt",           "perturbed/meta.txt",  "perturbed/edges.txt",
                   "perturbed/features.txt", "perturbed/labels.txt", "perturbed/masks.txt"};
    write_manifest(out_dir, m);

    const auto t1 = Clock::now();
    AttackResult result;
    if (objective == "supervised") {
      SurrogateConfig sc;
      sc.epochs = surrogate_epochs;
      sc.lr = surrogate_lr;
      sc.hops = hops;
      sc.objective_train_only = train_only;
      result = supervised_attack(ds.graph, pb, sc, seed, retrain_every, score_batch);
    } else if (objective == "unsupervised") {
      if (checkpoint.empty())
        throw std::runtime_error("unsupervised attack requires --checkpoint");
      const Checkpoint c = load_checkpoint(checkpoint);
      if (c.d.w.rows == 0)
        throw std::runtime_error("checkpoint has no discriminator; train dgi or graphacl first");
      result = unsupervised_attack(ds.graph, c.f1, c.f2 ? *c.f2 : c.f1, c.d, pb, seed,
                                   score_batch);
    } else {
      const SurrogateModel s =
          train_surrogate(ds.graph, surrogate_epochs, surrogate_lr, seed, hops);
      result = targeted_attack(ds.graph, target, flips, s, seed, floor);
    }
    const double t_attack = seconds_since(t1);

    AttackHeader header;
    header.dataset = ds.name;
    header.objective = objective;
    header.seed = seed;
    header.budget = flips;
    save_attack_result((out_dir / "attack.txt").string(), header, result);
    fs::create_directories(out_dir / "perturbed");
    save_planetoid(result.perturbed, (out_dir / "perturbed").string());

    const size_t applied = result.loss_trace.size();
    std::printf("%s attack on %s: %zu of %d perturbations applied", objective.c_str(),
                ds.name.c_str(), applied, flips);
    if (applied > 0) std::printf(", final objective %.6f", result.loss_trace.back());
    std::printf("\n");
    std::printf("artifacts in %s\n", out_dir.string().c_str());
    return finalize_manifest(
        out_dir, m, {{"load", t_load}, {"attack", t_attack}, {"total", seconds_since(t0)}});
  }
};

// ---------------------------------------------------------------------------
// eval / sweep share their config surface

struct EvalKnobs {
  std::string config_path, seeds_csv;
  uint64_t seed = 0;
  int jobs = 1;
  int epochs = 0, dim = 0, patience = 0, score_batch = 8, retrain_every = 10;
  double lr = 0, graphacl_rate = 0.03, gcl_rate = 0.2;
  bool probe_only = false;
  CLI::Option *o_epochs = nullptr, *o_dim = nullptr, *o_patience = nullptr, *o_lr = nullptr,
              *o_seeds = nullptr, *o_score_batch = nullptr, *o_retrain = nullptr,
              *o_graphacl_rate = nullptr, *o_gcl_rate = nullptr;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pretraining config file (key=value)");
    cmd->add_option("--seed", seed, "base seed; also seeds target selection")
        ->capture_default_str();
    o_seeds = cmd->add_option("--seeds", seeds_csv,
                              "evaluation seeds, comma separated (default: seed..seed+4)");
    cmd->add_option("--jobs,-j", jobs, "worker threads across seeds/targets")
        ->capture_default_str();
    o_epochs = cmd->add_option("--epochs", epochs, "pretraining epochs override");
    o_dim = cmd->add_option("--dim", dim, "pretraining embedding dim override");
    o_patience = cmd->add_option("--patience", patience, "pretraining patience override");
    o_lr = cmd->add_option("--lr", lr, "pretraining learning rate override");
    o_graphacl_rate =
        cmd->add_option("--graphacl-rate", graphacl_rate, "adversarial-view rate for graphacl");
    o_gcl_rate = cmd->add_option("--gcl-rate", gcl_rate, "random edge-drop rate for gcl");
    o_score_batch =
        cmd->add_option("--score-batch", score_batch, "flips applied per metattack scan");
    o_retrain =
        cmd->add_option("--retrain-every", retrain_every, "surrogate retrain cadence (flips)");
    cmd->add_flag("--probe-only", probe_only,
                  "poisoning refits only the probe, not the encoder");
  }

  EvalConfig build(const std::string& dataset_name) const {
    EvalConfig cfg;
    cfg.dataset = dataset_name;
    if (!config_path.empty()) cfg.pretrain = read_train_config(config_path);
    if (*o_epochs) cfg.pretrain.epochs = epochs;
    if (*o_dim) cfg.pretrain.embedding_dim = dim;
    if (*o_patience) cfg.pretrain.patience = patience;
    if (*o_lr) cfg.pretrain.learning_rate = lr;
    if (*o_graphacl_rate) cfg.graphacl_rate = graphacl_rate;
    if (*o_gcl_rate) cfg.gcl_rate = gcl_rate;
    if (*o_score_batch) cfg.attack_score_batch = score_batch;
    if (*o_retrain) cfg.surrogate_retrain_every = retrain_every;
    cfg.poison_retrain_encoder = !probe_only;
    return cfg;
  }

  json echo(const EvalConfig& cfg) const {
    return {{"pretrain", train_config_json(cfg.pretrain)},
            {"gcn", train_config_json(cfg.gcn)},
            {"graphacl_rate", cfg.graphacl_rate},
            {"gcl_rate", cfg.gcl_rate},
            {"attack_score_batch", cfg.attack_score_batch},
            {"surrogate_retrain_every", cfg.surrogate_retrain_every},
            {"poison_retrain_encoder", cfg.poison_retrain_encoder},
            {"jobs", jobs}};
  }
};

struct EvalArgs {
  std::string dataset, method, protocol = "targeted", setting = "evasive", out;
  std::string levels_csv = "0,1,2,3,4", eval_rates_csv = "0,0.05,0.2";
  double train_rate = 0;
  CLI::Option* o_train_rate = nullptr;
  EvalKnobs knobs;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    const DatasetRef ds = resolve_dataset(dataset);
    const double t_load = seconds_since(t0);

    const Method md = method_from_string(method);
    const EvalConfig cfg = knobs.build(ds.name);
    const std::vector<uint64_t> seeds =
        resolve_seeds(knobs.seeds_csv, knobs.o_seeds->count() > 0, knobs.seed);

    const fs::path out_dir = out;
    fs::create_directories(out_dir);
    Manifest m;
    m.command = cmdline;
    m.seed = knobs.seed;
    m.dataset = ds.meta;
    m.config = knobs.echo(cfg);
    m.config["method"] = method;
    m.config["protocol"] = protocol;
    m.config["seeds"] = seeds;
    m.artifacts = {"report.csv", "report.json"};
    write_manifest(out_dir, m);

    const auto t1 = Clock::now();
    std::vector<ExperimentReport> parts(seeds.size());
    if (protocol == "targeted") {
      const std::vector<int> levels = parse_ints(levels_csv, "level");
      const EvalSetting st = [&] {
        if (setting == "evasive") return EvalSetting::evasive;
        if (setting == "poisoning") return EvalSetting::poisoning;
        throw std::runtime_error("unknown setting '" + setting + "' (evasive, poisoning)");
      }();
      m.config["levels"] = levels;
      m.config["setting"] = setting;
      TrainConfig sel_cfg = cfg.gcn;
      sel_cfg.seed = knobs.seed;
      const GcnModel selector = train_gcn_supervised(ds.graph, sel_cfg);
      const TargetSelection targets = select_targets(ds.graph, selector, knobs.seed);
      parallel_for(knobs.jobs, static_cast<int>(seeds.size()), [&](int i) {
        parts[static_cast<size_t>(i)] =
            evaluate_targeted(ds.graph, md, targets, levels, st,
                              {seeds[static_cast<size_t>(i)]}, cfg);
      });
    } else if (protocol == "metattack") {
      const std::vector<double> eval_rates = parse_doubles(eval_rates_csv, "rate");
      const double tr = *o_train_rate ? train_rate
                        : md == Method::graphacl ? cfg.graphacl_rate
                                                 : 0.0;
      m.config["eval_rates"] = eval_rates;
      m.config["train_rate"] = tr;
      const MetattackGraphs graphs =
          make_metattack_graphs(ds.graph, eval_rates, derive_seed(seeds.front(), "attack"), cfg);
      parallel_for(knobs.jobs, static_cast<int>(seeds.size()), [&](int i) {
        parts[static_cast<size_t>(i)] = evaluate_metattack(
            ds.graph, md, tr, graphs, {seeds[static_cast<size_t>(i)]}, cfg);
      });
    } else {
      throw std::runtime_error("unknown protocol '" + protocol + "' (targeted, metattack)");
    }
    const ExperimentReport rep = merge_single_seed(parts);
    const double t_eval = seconds_since(t1);

    write_report_csv(rep, (out_dir / "report.csv").string());
    write_report_json(rep, (out_dir / "report.json").string());
    print_report(rep);
    std::printf("artifacts in %s\n", out_dir.string().c_str());
    return finalize_manifest(out_dir, m,
                             {{"load", t_load}, {"eval", t_eval}, {"total", seconds_since(t0)}});
  }
};

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
  std::string dataset, rates_csv, eval_rates_csv = "0,0.05,0.2", out;
  EvalKnobs knobs;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    const DatasetRef ds = resolve_dataset(dataset);
    const double t_load = seconds_since(t0);

    const EvalConfig cfg = knobs.build(ds.name);
    const std::vector<uint64_t> seeds =
        resolve_seeds(knobs.seeds_csv, knobs.o_seeds->count() > 0, knobs.seed);
    const std::vector<double> rates = parse_doubles(rates_csv, "rate");
    const std::vector<double> eval_rates = parse_doubles(eval_rates_csv, "rate");
    if (rates.empty()) throw std::runtime_error("--rates: at least one rate is required");

    const fs::path out_dir = out;
    fs::create_directories(out_dir);
    Manifest m;
    m.command = cmdline;
    m.seed = knobs.seed;
    m.dataset = ds.meta;
    m.config = knobs.echo(cfg);
    m.config["rates"] = rates;
    m.config["eval_rates"] = eval_rates;
    m.config["seeds"] = seeds;
    m.artifacts = {"report.csv", "report.json", "sweep_plot.csv"};
    write_manifest(out_dir, m);

    const auto t1 = Clock::now();
    const MetattackGraphs graphs =
        make_metattack_graphs(ds.graph, eval_rates, derive_seed(seeds.front(), "attack"), cfg);
    const int n_seeds = static_cast<int>(seeds.size());
    const int items = static_cast<int>(rates.size()) * n_seeds;
    std::vector<ExperimentReport> parts(static_cast<size_t>(items));
    std::vector<MetattackDetail> details(static_cast<size_t>(items));
    parallel_for(knobs.jobs, items, [&](int idx) {
      const size_t ri = static_cast<size_t>(idx / n_seeds);
      const size_t si = static_cast<size_t>(idx % n_seeds);
      parts[static_cast<size_t>(idx)] =
          evaluate_metattack(ds.graph, Method::graphacl, rates[ri], graphs, {seeds[si]}, cfg,
                             &details[static_cast<size_t>(idx)]);
    });

    ExperimentReport rep;
    std::string plot = "rate,setting,level,seed,accuracy\n";
    for (size_t ri = 0; ri < rates.size(); ++ri) {
      std::vector<ExperimentReport> per_rate(parts.begin() + static_cast<long>(ri) * n_seeds,
                                             parts.begin() + static_cast<long>(ri + 1) * n_seeds);
      const ExperimentReport one = merge_single_seed(per_rate);
      rep.rows.insert(rep.rows.end(), one.rows.begin(), one.rows.end());
      for (int si = 0; si < n_seeds; ++si) {
        const MetattackDetail& det = details[ri * static_cast<size_t>(n_seeds) +
                                             static_cast<size_t>(si)];
        for (size_t ei = 0; ei < det.rates.size(); ++ei)
          plot += fmt("%g,%s,%g,%llu,%.6f\n", rates[ri],
                      det.rates[ei] == 0.0 ? "clean" : "evasive", det.rates[ei],
                      static_cast<unsigned long long>(seeds[static_cast<size_t>(si)]),
                      det.accuracy[0][ei]);
      }
    }
    const double t_eval = seconds_since(t1);

    {
      std::ofstream pout(out_dir / "sweep_plot.csv");
      if (!pout) throw std::runtime_error("cannot write sweep_plot.csv");
      pout << plot;
    }
    write_report_csv(rep, (out_dir / "report.csv").string());
    write_report_json(rep, (out_dir / "report.json").string());
    print_report(rep);
    std::printf("artifacts in %s\n", out_dir.string().c_str());
    return finalize_manifest(out_dir, m,
                             {{"load", t_load}, {"eval", t_eval}, {"total", seconds_since(t0)}});
  }
};

// ---------------------------------------------------------------------------
// gradcheck

struct GradcheckArgs {
  std::string out;
  uint64_t seed = 0;
  int instances = 60;
  double tolerance = 1e-4, step = 1e-5, pair_step = 1e-4;
  bool inject = false;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    GradCheckOptions opts;
    opts.seed = seed;
    opts.instances = instances;
    opts.tolerance = tolerance;
    opts.step = step;
    opts.pair_step = pair_step;
    opts.inject_bad_grad = inject;
    const GradCheckReport rep = run_gradcheck(opts);

    // Per-operation aggregation in first-seen order.
    std::vector<std::string> ops;
    std::vector<double> max_err;
    std::vector<int> n_cmp;
    std::vector<bool> ok;
    for (const GradCheckEntry& e : rep.checks) {
      size_t k = 0;
      while (k < ops.size() && ops[k] != e.op) ++k;
      if (k == ops.size()) {
        ops.push_back(e.op);
        max_err.push_back(0.0);
        n_cmp.push_back(0);
        ok.push_back(true);
      }
      max_err[k] = std::max(max_err[k], e.max_rel_err);
      n_cmp[k] += e.comparisons;
      ok[k] = ok[k] && e.pass;
    }
    std::string text;
    for (size_t k = 0; k < ops.size(); ++k)
      text += fmt("%-18s max rel err %.3e over %5d comparisons  %s\n", ops[k].c_str(),
                  max_err[k], n_cmp[k], ok[k] ? "ok" : "FAIL");
    text += fmt("gradcheck: %d instances, %d comparisons, max rel err %.3e, tolerance %g: %s\n",
                rep.instance_count, rep.comparison_count, rep.max_rel_err, rep.tolerance,
                rep.pass() ? "PASS" : "FAIL");
    std::fputs(text.c_str(), stdout);

    int rc = rep.pass() ? 0 : 1;
    if (!out.empty()) {
      const fs::path out_dir = out;
      fs::create_directories(out_dir);
      Manifest m;
      m.command = cmdline;
      m.seed = seed;
      m.config = {{"instances", instances}, {"tolerance", tolerance},   {"step", step},
                  {"pair_step", pair_step}, {"inject_bad_grad", inject}};
      m.artifacts = {"gradcheck.txt"};
      write_manifest(out_dir, m);
      std::ofstream f(out_dir / "gradcheck.txt");
      if (!f) throw std::runtime_error("cannot write gradcheck.txt");
      f << text;
      f.close();
      rc |= finalize_manifest(out_dir, m, {{"total", seconds_since(t0)}});
    }
    return rc;
  }
};

// ---------------------------------------------------------------------------
// convert

struct ConvertArgs {
  std::string content, cites, out;
  std::string cmdline;

  int run() const {
    const auto t0 = Clock::now();
    const fs::path out_dir = out;
    fs::create_directories(out_dir);
    Manifest m;
    m.command = cmdline;
    m.config = {{"content", fs::absolute(content).string()},
                {"cites", fs::absolute(cites).string()}};
    m.artifacts = {"meta.txt", "edges.txt", "features.txt", "labels.txt", "masks.txt"};
    write_manifest(out_dir, m);

    const ConvertStats st = convert_linqs(content, cites, out_dir.string());
    m.dataset = {{"name", out_dir.filename().string()},
                 {"path", fs::absolute(out_dir).string()},
                 {"checksum",
                  fmt("%016llx",
                      static_cast<unsigned long long>(dataset_checksum(out_dir.string())))}};
    std::printf("converted %d nodes; %d edges kept, %d dangling citations skipped\n", st.nodes,
                st.edges_kept, st.edges_dangling);
    std::printf("dataset in %s\n", out_dir.string().c_str());
    return finalize_manifest(out_dir, m, {{"total", seconds_since(t0)}});
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph contrastive learning with adversarial augmentations"};
  app.require_subcommand(1);
  const std::string cmdline = command_echo(argc, argv);
  int exit_code = 0;

  auto train = std::make_shared<TrainArgs>();
  train->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("train", "train an encoder or GCN classifier");
    c->add_option("--dataset,-d", train->dataset, "dataset dir, name under $GRAPHACL_DATA, or synth:cora / synth:citeseer")
        ->required();
    c->add_option("--method", train->method, "gcn | dgi | graphacl")->required();
    c->add_option("--out,-o", train->out, "output directory")->required();
    c->add_option("--seed", train->seed, "run seed")->capture_default_str();
    c->add_option("--config", train->config_path, "training config file (key=value)");
    train->o_epochs = c->add_option("--epochs", train->epochs, "training epochs");
    train->o_lr = c->add_option("--lr", train->lr, "learning rate");
    train->o_wd = c->add_option("--weight-decay", train->weight_decay, "L2 weight decay");
    train->o_dim = c->add_option("--dim", train->dim, "embedding dimension");
    train->o_layers = c->add_option("--layers", train->layers, "encoder layers (1 or 2)");
    train->o_alpha = c->add_option("--alpha", train->alpha, "adversarial local-global weight");
    train->o_beta = c->add_option("--beta", train->beta, "adversarial global-local weight");
    train->o_adv_mode = c->add_option(
        "--adv-mode", train->adv_mode, "none | random-drop | unsupervised | supervised");
    train->o_adv_rate = c->add_option("--adv-rate", train->adv_rate,
                                      "perturbation budget as a fraction of |E|");
    train->o_refresh = c->add_option("--refresh-every", train->refresh_every,
                                     "epochs between adversarial-view refreshes");
    train->o_patience = c->add_option("--patience", train->patience, "early-stop patience");
    c->callback([train, &exit_code] { exit_code = train->run(); });
  }

  auto attack = std::make_shared<AttackArgs>();
  attack->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("attack", "greedy gradient attack on a graph");
    c->add_option("--dataset,-d", attack->dataset, "dataset to perturb")->required();
    c->add_option("--objective", attack->objective, "supervised | unsupervised | targeted")
        ->required();
    c->add_option("--out,-o", attack->out, "output directory")->required();
    c->add_option("--seed", attack->seed, "run seed")->capture_default_str();
    attack->o_budget = c->add_option("--budget", attack->budget, "number of flips");
    attack->o_rate = c->add_option("--rate", attack->rate, "flip budget as a fraction of |E|");
    attack->o_target = c->add_option("--target", attack->target, "target node (targeted)");
    c->add_option("--targets", attack->targets_csv,
                  "restrict flips to pairs incident to these nodes");
    c->add_option("--checkpoint", attack->checkpoint,
                  "trained encoder checkpoint (unsupervised)");
    c->add_option("--floor", attack->floor, "minimum degree preserved by edge removals")
        ->capture_default_str();
    c->add_option("--score-batch", attack->score_batch, "flips applied per gradient scan")
        ->capture_default_str();
    c->add_option("--retrain-every", attack->retrain_every,
                  "surrogate retrain cadence in flips (0 = never)")
        ->capture_default_str();
    c->add_option("--surrogate-epochs", attack->surrogate_epochs, "surrogate training epochs")
        ->capture_default_str();
    c->add_option("--surrogate-lr", attack->surrogate_lr, "surrogate learning rate")
        ->capture_default_str();
    c->add_option("--hops", attack->hops, "surrogate propagation depth")->capture_default_str();
    c->add_flag("--train-only", attack->train_only,
                "score the objective on train nodes only (no self-training)");
    c->callback([attack, &exit_code] { exit_code = attack->run(); });
  }

  auto eval = std::make_shared<EvalArgs>();
  eval->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("eval", "robustness protocols: targeted or metattack");
    c->add_option("--dataset,-d", eval->dataset, "dataset to evaluate on")->required();
    c->add_option("--method", eval->method, "gcn | dgi | gcl | graphacl")->required();
    c->add_option("--protocol", eval->protocol, "targeted | metattack")->capture_default_str();
    c->add_option("--setting", eval->setting, "evasive | poisoning (targeted)")
        ->capture_default_str();
    c->add_option("--out,-o", eval->out, "output directory")->required();
    c->add_option("--levels", eval->levels_csv, "perturbation counts (targeted)")
        ->capture_default_str();
    c->add_option("--eval-rates", eval->eval_rates_csv, "evaluation flip rates (metattack)")
        ->capture_default_str();
    eval->o_train_rate = c->add_option("--train-rate", eval->train_rate,
                                       "graphacl training rate (metattack)");
    eval->knobs.add_to(c);
    c->callback([eval, &exit_code] { exit_code = eval->run(); });
  }

  auto sweep = std::make_shared<SweepArgs>();
  sweep->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("sweep", "metattack robustness across training rates");
    c->add_option("--dataset,-d", sweep->dataset, "dataset to evaluate on")->required();
    c->add_option("--rates", sweep->rates_csv, "graphacl training rates, comma separated")
        ->required();
    c->add_option("--eval-rates", sweep->eval_rates_csv, "evaluation flip rates")
        ->capture_default_str();
    c->add_option("--out,-o", sweep->out, "output directory")->required();
    sweep->knobs.add_to(c);
    c->callback([sweep, &exit_code] { exit_code = sweep->run(); });
  }

  auto gradcheck = std::make_shared<GradcheckArgs>();
  gradcheck->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("gradcheck",
                                     "finite-difference audit of every analytic gradient");
    c->add_option("--seed", gradcheck->seed, "instance generator seed")->capture_default_str();
    c->add_option("--instances", gradcheck->instances, "random instances")
        ->capture_default_str();
    c->add_option("--tolerance", gradcheck->tolerance, "max relative error allowed")
        ->capture_default_str();
    c->add_option("--step", gradcheck->step, "finite-difference step (parameters)")
        ->capture_default_str();
    c->add_option("--pair-step", gradcheck->pair_step, "finite-difference step (edge pairs)")
        ->capture_default_str();
    c->add_flag("--inject-bad-grad", gradcheck->inject,
                "negate one analytic gradient to prove the harness catches it");
    c->add_option("--out,-o", gradcheck->out, "optional output directory for gradcheck.txt");
    c->callback([gradcheck, &exit_code] { exit_code = gradcheck->run(); });
  }

  auto convert = std::make_shared<ConvertArgs>();
  convert->cmdline = cmdline;
  {
    CLI::App* c = app.add_subcommand("convert", "convert LINQS .content/.cites files");
    c->add_option("--content", convert->content, ".content file (id features... label)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--cites", convert->cites, ".cites file (cited citing)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--out,-o", convert->out, "output dataset directory")->required();
    c->callback([convert, &exit_code] { exit_code = convert->run(); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
