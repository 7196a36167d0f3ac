#include "graphacl/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace graphacl {

namespace {

std::string join(const std::string& dir, const std::string& name) {
  return name.empty() ? dir : (fs::path(dir) / name).string();
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& tok, const std::string& file, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError(file, line, "expected integer, got '" + tok + "'");
  return v;
}

double parse_double(const std::string& tok, const std::string& file, int line) {
  try {
    size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(file, line, "expected number, got '" + tok + "'");
  }
}

}  // namespace

ParseError::ParseError(std::string file_, int line_, const std::string& msg)
    : std::runtime_error(file_ + ":" + std::to_string(line_) + ": " + msg),
      file(std::move(file_)),
      line(line_) {}

AttributedGraph load_planetoid(const std::string& dir, const std::string& name) {
  const std::string root = join(dir, name);
  const std::string meta_path = (fs::path(root) / "meta.txt").string();
  auto meta_in = open_or_throw(meta_path);
  std::string line;
  if (!std::getline(meta_in, line)) throw ParseError(meta_path, 1, "empty meta file");
  auto toks = split_ws(line);
  if (toks.size() != 6)
    throw ParseError(meta_path, 1, "expected 'N D K n_train n_val n_test'");
  const int n = parse_int(toks[0], meta_path, 1);
  const int d = parse_int(toks[1], meta_path, 1);
  const int k = parse_int(toks[2], meta_path, 1);
  const int want_train = parse_int(toks[3], meta_path, 1);
  const int want_val = parse_int(toks[4], meta_path, 1);
  const int want_test = parse_int(toks[5], meta_path, 1);
  if (n <= 0 || d <= 0 || k <= 0) throw ParseError(meta_path, 1, "N, D, K must be positive");

  const std::string edges_path = (fs::path(root) / "edges.txt").string();
  auto edges_in = open_or_throw(edges_path);
  std::vector<std::pair<int, int>> edges;
  int lineno = 0;
  while (std::getline(edges_in, line)) {
    ++lineno;
    auto t = split_ws(line);
    if (t.empty()) continue;
    if (t.size() != 2) throw ParseError(edges_path, lineno, "expected 'i j'");
    const int i = parse_int(t[0], edges_path, lineno);
    const int j = parse_int(t[1], edges_path, lineno);
    if (i < 0 || i >= n || j < 0 || j >= n)
      throw ParseError(edges_path, lineno, "node id out of range");
    if (i == j) throw ParseError(edges_path, lineno, "self loop");
    edges.emplace_back(i, j);
  }

  const std::string feat_path = (fs::path(root) / "features.txt").string();
  auto feat_in = open_or_throw(feat_path);
  DenseMatrix x(n, d);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(feat_in, line))
      throw ParseError(feat_path, i + 1, "unexpected end of file, expected " + std::to_string(n) + " rows");
    auto t = split_ws(line);
    if (static_cast<int>(t.size()) != d)
      throw ParseError(feat_path, i + 1,
                       "expected " + std::to_string(d) + " values, got " + std::to_string(t.size()));
    for (int j = 0; j < d; ++j) x(i, j) = parse_double(t[j], feat_path, i + 1);
  }

  const std::string labels_path = (fs::path(root) / "labels.txt").string();
  auto labels_in = open_or_throw(labels_path);
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) {
    if (!std::getline(labels_in, line)) throw ParseError(labels_path, i + 1, "unexpected end of file");
    auto t = split_ws(line);
    if (t.size() != 1) throw ParseError(labels_path, i + 1, "expected one label per line");
    labels[i] = parse_int(t[0], labels_path, i + 1);
    if (labels[i] < -1 || labels[i] >= k) throw ParseError(labels_path, i + 1, "label out of range");
  }

  const std::string masks_path = (fs::path(root) / "masks.txt").string();
  auto masks_in = open_or_throw(masks_path);
  std::vector<uint8_t> train(n, 0), val(n, 0), test(n, 0);
  int n_train = 0, n_val = 0, n_test = 0;
  for (int i = 0; i < n; ++i) {
    if (!std::getline(masks_in, line)) throw ParseError(masks_path, i + 1, "unexpected end of file");
    auto t = split_ws(line);
    if (t.size() != 1) throw ParseError(masks_path, i + 1, "expected one of train|val|test|none");
    if (t[0] == "train") {
      train[i] = 1;
      ++n_train;
    } else if (t[0] == "val") {
      val[i] = 1;
      ++n_val;
    } else if (t[0] == "test") {
      test[i] = 1;
      ++n_test;
    } else if (t[0] != "none") {
      throw ParseError(masks_path, i + 1, "unknown mask '" + t[0] + "'");
    }
  }
  if (n_train != want_train || n_val != want_val || n_test != want_test)
    throw ParseError(masks_path, 0, "mask counts do not match meta.txt");

  AttributedGraph g = make_graph(n, edges, std::move(x));
  for (auto& v : g.features.data) v = v > 0.0 ? 1.0 : 0.0;
  g.labels = std::move(labels);
  g.train_mask = std::move(train);
  g.val_mask = std::move(val);
  g.test_mask = std::move(test);
  g.num_classes = k;
  for (int i = 0; i < n; ++i)
    if (g.train_mask[i] && g.labels[i] < 0)
      throw ParseError(labels_path, i + 1, "train node has no label");
  g.validate();
  return g;
}

void save_planetoid(const AttributedGraph& g, const std::string& dir) {
  fs::create_directories(dir);
  const int n = g.n();
  int n_train = 0, n_val = 0, n_test = 0;
  for (int i = 0; i < n; ++i) {
    n_train += !g.train_mask.empty() && g.train_mask[i];
    n_val += !g.val_mask.empty() && g.val_mask[i];
    n_test += !g.test_mask.empty() && g.test_mask[i];
  }
  {
    std::ofstream out(fs::path(dir) / "meta.txt");
    out << n << ' ' << g.dim() << ' ' << std::max(g.num_classes, 1) << ' ' << n_train << ' '
        << n_val << ' ' << n_test << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "edges.txt");
    for (auto [i, j] : undirected_edges(g)) out << i << ' ' << j << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "features.txt");
    char buf[64];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < g.dim(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", g.features(i, j));
        out << (j ? " " : "") << buf;
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(fs::path(dir) / "labels.txt");
    for (int i = 0; i < n; ++i) out << (g.labels.empty() ? -1 : g.labels[i]) << '\n';
  }
  {
    std::ofstream out(fs::path(dir) / "masks.txt");
    for (int i = 0; i < n; ++i) {
      const char* m = "none";
      if (!g.train_mask.empty() && g.train_mask[i]) m = "train";
      else if (!g.val_mask.empty() && g.val_mask[i]) m = "val";
      else if (!g.test_mask.empty() && g.test_mask[i]) m = "test";
      out << m << '\n';
    }
  }
}

ConvertStats convert_linqs(const std::string& content_path, const std::string& cites_path,
                           const std::string& out_dir) {
  auto content_in = open_or_throw(content_path);
  std::string line;
  std::map<std::string, int> id_of;
  std::vector<std::vector<double>> feat_rows;
  std::vector<std::string> label_names;
  std::vector<int> label_raw;
  int d = -1, lineno = 0;
  while (std::getline(content_in, line)) {
    ++lineno;
    auto t = split_ws(line);
    if (t.empty()) continue;
    if (t.size() < 3) throw ParseError(content_path, lineno, "expected '<id> <features...> <label>'");
    if (d < 0) d = static_cast<int>(t.size()) - 2;
    if (static_cast<int>(t.size()) != d + 2)
      throw ParseError(content_path, lineno, "inconsistent column count");
    if (id_of.count(t[0])) throw ParseError(content_path, lineno, "duplicate node id '" + t[0] + "'");
    id_of[t[0]] = static_cast<int>(feat_rows.size());
    std::vector<double> row(d);
    for (int j = 0; j < d; ++j) row[j] = parse_double(t[j + 1], content_path, lineno);
    feat_rows.push_back(std::move(row));
    const std::string& lab = t.back();
    auto it = std::find(label_names.begin(), label_names.end(), lab);
    if (it == label_names.end()) {
      label_names.push_back(lab);
      label_raw.push_back(static_cast<int>(label_names.size()) - 1);
    } else {
      label_raw.push_back(static_cast<int>(it - label_names.begin()));
    }
  }
  const int n = static_cast<int>(feat_rows.size());
  if (n == 0) throw ParseError(content_path, 0, "no nodes");

  // Stable class ids: sort label names, remap.
  std::vector<std::string> sorted_names = label_names;
  std::sort(sorted_names.begin(), sorted_names.end());
  std::vector<int> remap(label_names.size());
  for (size_t i = 0; i < label_names.size(); ++i)
    remap[i] = static_cast<int>(std::find(sorted_names.begin(), sorted_names.end(),
                                          label_names[i]) -
                                sorted_names.begin());
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = remap[label_raw[i]];
  const int k = static_cast<int>(sorted_names.size());

  auto cites_in = open_or_throw(cites_path);
  std::vector<std::pair<int, int>> edges;
  ConvertStats stats;
  stats.nodes = n;
  lineno = 0;
  while (std::getline(cites_in, line)) {
    ++lineno;
    auto t = split_ws(line);
    if (t.empty()) continue;
    if (t.size() != 2) throw ParseError(cites_path, lineno, "expected '<id> <id>'");
    auto a = id_of.find(t[0]);
    auto b = id_of.find(t[1]);
    if (a == id_of.end() || b == id_of.end()) {
      ++stats.edges_dangling;
      continue;
    }
    if (a->second == b->second) continue;
    edges.emplace_back(a->second, b->second);
  }

  DenseMatrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = feat_rows[i][j];
  AttributedGraph g = make_graph(n, edges, std::move(x));
  for (auto& v : g.features.data) v = v > 0.0 ? 1.0 : 0.0;
  stats.edges_kept = g.edge_count();
  g.labels = labels;
  g.num_classes = k;

  // Transductive split: 20 per class in file order, 500 val, last 1000 test.
  g.train_mask.assign(n, 0);
  g.val_mask.assign(n, 0);
  g.test_mask.assign(n, 0);
  std::vector<int> per_class(k, 0);
  for (int i = 0; i < n; ++i) {
    if (per_class[labels[i]] < 20) {
      g.train_mask[i] = 1;
      ++per_class[labels[i]];
    }
  }
  int val_left = 500;
  for (int i = 0; i < n && val_left > 0; ++i) {
    if (!g.train_mask[i]) {
      g.val_mask[i] = 1;
      --val_left;
    }
  }
  int test_left = 1000;
  for (int i = n - 1; i >= 0 && test_left > 0; --i) {
    if (!g.train_mask[i] && !g.val_mask[i]) {
      g.test_mask[i] = 1;
      --test_left;
    }
  }
  g.validate();
  save_planetoid(g, out_dir);
  return stats;
}

uint64_t dataset_checksum(const std::string& dir) {
  uint64_t h = 1469598103934665603ull;
  for (const char* f : {"meta.txt", "edges.txt", "features.txt", "labels.txt", "masks.txt"}) {
    std::ifstream in(fs::path(dir) / f, std::ios::binary);
    if (!in) continue;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      for (std::streamsize i = 0; i < in.gcount(); ++i) {
        h ^= static_cast<unsigned char>(buf[i]);
        h *= 1099511628211ull;
      }
    }
  }
  return h;
}

}  // namespace graphacl
