#include "graphacl/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "graphacl/attack.hpp"
#include "graphacl/contrastive.hpp"
#include "graphacl/encoder.hpp"
#include "graphacl/graph.hpp"
#include "graphacl/numerics.hpp"
#include "graphacl/rng.hpp"

namespace graphacl {

namespace {

// Normalized adjacency rebuilt from a continuous dense A, with the full n*n
// pattern so finite differences can move any entry: the same
// D^{-1/2}(A+I)D^{-1/2} the library applies to binary graphs.
SparseMatrix dense_normalized(const DenseMatrix& a) {
  const int n = a.rows;
  std::vector<double> deg(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) deg[i] += a(i, j);
  std::vector<std::pair<std::pair<int, int>, double>> entries;
  entries.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = (i == j ? 1.0 : 0.0) + a(i, j);
      entries.push_back({{i, j}, v / std::sqrt(deg[i] * deg[j])});
    }
  return SparseMatrix::from_coo(n, n, std::move(entries));
}

DenseMatrix dense_adjacency(const SparseMatrix& a) {
  DenseMatrix out(a.rows, a.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int e = a.offs[i]; e < a.offs[i + 1]; ++e) out(i, a.idx[e]) = a.vals[e];
  return out;
}

template <class F>
double central(double* slot, double h, F&& eval) {
  const double keep = *slot;
  *slot = keep + h;
  const double up = eval();
  *slot = keep - h;
  const double down = eval();
  *slot = keep;
  return (up - down) / (2.0 * h);
}

template <class F>
double central_pair(DenseMatrix& a, int i, int j, double h, F&& eval) {
  const double keep = a(i, j);
  a(i, j) = a(j, i) = keep + h;
  const double up = eval();
  a(i, j) = a(j, i) = keep - h;
  const double down = eval();
  a(i, j) = a(j, i) = keep;
  return (up - down) / (2.0 * h);
}

struct Comparer {
  const GradCheckOptions& opts;
  GradCheckReport& report;
  bool injected = false;

  void open(const std::string& op) { report.checks.push_back({op, 0.0, 0, true}); }

  double rel(double a, double b) const {
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
  }

  void compare(double analytic, double fd) {
    if (opts.inject_bad_grad && !injected && std::abs(fd) >= 1e-3) {
      analytic = -analytic;
      injected = true;
    }
    GradCheckEntry& e = report.checks.back();
    e.max_rel_err = std::max(e.max_rel_err, rel(analytic, fd));
    ++e.comparisons;
    if (rel(analytic, fd) > opts.tolerance) e.pass = false;
  }

  // Central differences miss correct gradients in two step-local ways:
  // truncation where curvature is large against a small derivative, and
  // PReLU-kink straddles when a pre-activation lies within h of zero. A
  // comparison over tolerance is therefore retried at h/4 and h/16 and keeps
  // its best step; a genuinely wrong gradient disagrees at every step.
  template <class Probe>
  void refine(double analytic, double h, Probe&& fd_at) {
    double fd = fd_at(h);
    for (int r = 0; r < 2 && rel(analytic, fd) > opts.tolerance; ++r) {
      h /= 4.0;
      const double again = fd_at(h);
      if (rel(analytic, again) < rel(analytic, fd)) fd = again;
    }
    compare(analytic, fd);
  }

  template <class F>
  void matrix(DenseMatrix& m, const DenseMatrix& grad, F&& eval) {
    for (size_t i = 0; i < m.data.size(); ++i)
      refine(grad.data[i], opts.step, [&](double h) { return central(&m.data[i], h, eval); });
  }

  template <class F>
  void vector(std::vector<double>& v, const std::vector<double>& grad, F&& eval) {
    for (size_t i = 0; i < v.size(); ++i)
      refine(grad[i], opts.step, [&](double h) { return central(&v[i], h, eval); });
  }

  template <class F>
  void encoder(EncoderParams& f, const std::vector<DenseMatrix>& w_grads,
               const std::vector<double>& slope_grads, F&& eval) {
    for (int l = 0; l < f.layer_count(); ++l) matrix(f.weights[l], w_grads[l], eval);
    vector(f.slopes, slope_grads, eval);
  }
};

// One random problem: a small graph pair, two encoders, a discriminator.
struct Instance {
  AttributedGraph g, g_adv;
  DenseMatrix a_dense, a_adv_dense;
  SparseMatrix a_hat, a_hat_adv;
  EncoderParams f1, f2;
  DiscriminatorParams d;
  int classes = 2;
  uint64_t seed = 0;
  std::vector<std::pair<int, int>> pairs;  // FD probes on adjacency entries
};

Instance make_instance(uint64_t seed) {
  Rng rng(seed);
  const int n = 4 + rng.uniform_int(5);   // 4..8
  const int dim = 2 + rng.uniform_int(4);  // 2..5
  const int h = 2 + rng.uniform_int(3);    // 2..4
  const int layers = 1 + rng.uniform_int(2);

  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < 0.45) edges.push_back({i, j});
  if (edges.empty()) edges.push_back({0, 1});

  DenseMatrix x(n, dim);
  for (double& v : x.data) v = rng.uniform(-2.0, 2.0);

  Instance inst;
  inst.seed = rng.next_u64();
  inst.g = make_graph(n, edges, std::move(x));
  inst.classes = 2 + rng.uniform_int(std::min(3, dim - 1) + 1);
  inst.g.num_classes = inst.classes;
  inst.g.labels.resize(n);
  for (int& y : inst.g.labels) y = rng.uniform_int(inst.classes);
  inst.g.train_mask.assign(n, 1);
  inst.g.val_mask.assign(n, 0);
  inst.g.test_mask.assign(n, 0);

  inst.g_adv = inst.g;
  for (int t = 0; t < 3; ++t) {
    const int i = rng.uniform_int(n), j = rng.uniform_int(n);
    if (i != j) inst.g_adv.adjacency = toggle_pair(inst.g_adv.adjacency, i, j);
  }

  inst.a_dense = dense_adjacency(inst.g.adjacency);
  inst.a_adv_dense = dense_adjacency(inst.g_adv.adjacency);
  inst.a_hat = normalize_adjacency(inst.g);
  inst.a_hat_adv = normalize_adjacency(inst.g_adv);

  std::vector<int> dims{dim, h};
  if (layers == 2) dims.push_back(h);
  inst.f1 = init_encoder(dims, rng);
  inst.f2 = init_encoder(dims, rng);
  inst.d = init_discriminator(h, rng);

  while (inst.pairs.size() < 4) {
    const int i = rng.uniform_int(n), j = rng.uniform_int(n);
    if (i < j && std::find(inst.pairs.begin(), inst.pairs.end(), std::make_pair(i, j)) ==
                     inst.pairs.end())
      inst.pairs.push_back({i, j});
  }
  return inst;
}

// score = (1 - 2 A_ij) * (dL/dA_ij + dL/dA_ji): unsign it back into the raw
// symmetric-pair derivative for the FD comparison.
double pair_derivative(const AhatFactors& factors, const AttributedGraph& g,
                       const SparseMatrix& a_hat, int i, int j) {
  const std::vector<ScoredFlip> scored = structure_gradient(factors, g, a_hat, {{i, j}});
  return g.adjacency.has(i, j) ? -scored.front().score : scored.front().score;
}

void check_instance(const Instance& inst0, Comparer& c) {
  Instance inst = inst0;  // mutable parameter storage for FD probes
  const LossWeights w{0.5 + 0.1 * (inst.seed % 7), 0.5 + 0.1 * (inst.seed % 5)};

  {  // MI estimator on raw inputs
    c.open("mi-bce");
    Rng r(inst.seed);
    const int n = inst.g.n(), h = inst.f1.embedding_dim();
    DenseMatrix z_pos(n, h), z_neg(n, h);
    std::vector<double> s(h);
    for (double& v : z_pos.data) v = r.uniform(-2.0, 2.0);
    for (double& v : z_neg.data) v = r.uniform(-2.0, 2.0);
    for (double& v : s) v = r.uniform(-1.0, 1.0);
    MiBceGrads grads;
    mi_bce_loss(inst.d, z_pos, z_neg, s, &grads);
    const auto eval = [&] { return mi_bce_loss(inst.d, z_pos, z_neg, s); };
    c.matrix(z_pos, grads.z_pos, eval);
    c.matrix(z_neg, grads.z_neg, eval);
    c.vector(s, grads.s, eval);
    c.matrix(inst.d.w, grads.d_w, eval);
  }

  {  // DGI loss through the encoder
    c.open("dgi");
    const DgiResult base = dgi_loss(inst.f1, inst.d, inst.g, inst.a_hat, inst.seed, true);
    const auto eval = [&] {
      return dgi_loss(inst.f1, inst.d, inst.g, inst.a_hat, inst.seed, false).loss;
    };
    c.encoder(inst.f1, base.f_weights, base.f_slopes, eval);
    c.matrix(inst.d.w, base.d_w, eval);
  }

  for (const bool supervised : {true, false}) {  // both composite losses
    c.open(supervised ? "eq2" : "eq3");
    const auto loss = supervised ? graphacl_supervised_loss : graphacl_unsupervised_loss;
    CompositeOptions gopt;
    const CompositeResult base =
        loss(inst.f1, &inst.f2, inst.d, inst.g, inst.g_adv, w, inst.seed, gopt);
    CompositeOptions vopt;
    vopt.want_param_grads = false;
    const auto eval = [&] {
      return loss(inst.f1, &inst.f2, inst.d, inst.g, inst.g_adv, w, inst.seed, vopt)
          .report.total;
    };
    c.encoder(inst.f1, base.f1_weights, base.f1_slopes, eval);
    c.encoder(inst.f2, base.f2_weights, base.f2_slopes, eval);
    c.matrix(inst.d.w, base.d_w, eval);
  }

  {  // softmax cross-entropy
    c.open("ce");
    Rng r(inst.seed ^ 0x9e3779b97f4a7c15ULL);
    DenseMatrix logits(inst.g.n(), inst.classes);
    for (double& v : logits.data) v = r.uniform(-2.0, 2.0);
    DenseMatrix grad;
    cross_entropy(softmax_rows(logits), inst.g.labels, inst.g.train_mask, &grad);
    const auto eval = [&] {
      return cross_entropy(softmax_rows(logits), inst.g.labels, inst.g.train_mask);
    };
    c.matrix(logits, grad, eval);
  }

  {  // composite loss's adjacency-entry gradients through the normalization
    c.open("pairs-eq2");
    CompositeOptions fopt;
    fopt.want_param_grads = false;
    fopt.want_adv_factors = true;
    fopt.a_hat_adv = &inst.a_hat_adv;
    const CompositeResult base = graphacl_supervised_loss(inst.f1, &inst.f2, inst.d, inst.g,
                                                          inst.g_adv, w, inst.seed, fopt);
    for (const auto& [i, j] : inst.pairs) {
      const double analytic =
          pair_derivative(*base.adv_factors, inst.g_adv, inst.a_hat_adv, i, j);
      c.refine(analytic, c.opts.pair_step, [&](double h) {
        return central_pair(inst.a_adv_dense, i, j, h, [&] {
          const SparseMatrix perturbed = dense_normalized(inst.a_adv_dense);
          CompositeOptions vopt;
          vopt.want_param_grads = false;
          vopt.a_hat_adv = &perturbed;
          return graphacl_supervised_loss(inst.f1, &inst.f2, inst.d, inst.g, inst.g_adv, w,
                                          inst.seed, vopt)
              .report.total;
        });
      });
    }
  }

  {  // Eq. 18 attack objective, same chain
    c.open("pairs-eq18");
    const Eq18Cache cache =
        make_eq18_cache(inst.f1, inst.f2, inst.g, inst.a_hat, inst.seed);
    const Eq18Eval base = eq18_objective(cache, inst.f2, inst.d, inst.a_hat_adv, true);
    for (const auto& [i, j] : inst.pairs) {
      const double analytic =
          pair_derivative(*base.factors, inst.g_adv, inst.a_hat_adv, i, j);
      c.refine(analytic, c.opts.pair_step, [&](double h) {
        return central_pair(inst.a_adv_dense, i, j, h, [&] {
          return eq18_objective(cache, inst.f2, inst.d, dense_normalized(inst.a_adv_dense), false)
              .value;
        });
      });
    }
  }

  {  // surrogate cross-entropy through A-hat^hops
    c.open("pairs-surrogate");
    Rng r(inst.seed ^ 0xda942042e4dd58b5ULL);
    SurrogateModel sm;
    sm.hops = 1 + r.uniform_int(3);
    sm.weight = DenseMatrix(inst.g.dim(), inst.classes);
    for (double& v : sm.weight.data) v = r.uniform(-1.0, 1.0);
    AhatFactors factors;
    surrogate_objective(sm, inst.a_hat, inst.g.features, inst.g.labels, inst.g.train_mask,
                        &factors);
    for (const auto& [i, j] : inst.pairs) {
      const double analytic = pair_derivative(factors, inst.g, inst.a_hat, i, j);
      c.refine(analytic, c.opts.pair_step, [&](double h) {
        return central_pair(inst.a_dense, i, j, h, [&] {
          return surrogate_objective(sm, dense_normalized(inst.a_dense), inst.g.features,
                                     inst.g.labels, inst.g.train_mask);
        });
      });
    }
  }
}

}  // namespace

GradCheckReport run_gradcheck(const GradCheckOptions& opts) {
  detail::require(opts.instances >= 1, "gradcheck: need at least one instance");
  detail::require(opts.tolerance > 0.0 && opts.step > 0.0 && opts.pair_step > 0.0,
                  "gradcheck: tolerance and steps must be positive");

  GradCheckReport report;
  report.tolerance = opts.tolerance;
  Rng master = sub_rng(opts.seed, "gradcheck");
  Comparer comparer{opts, report};
  for (int i = 0; i < opts.instances; ++i) {
    check_instance(make_instance(master.next_u64()), comparer);
    ++report.instance_count;
  }
  for (const GradCheckEntry& e : report.checks) {
    report.max_rel_err = std::max(report.max_rel_err, e.max_rel_err);
    report.comparison_count += e.comparisons;
  }
  return report;
}

}  // namespace graphacl
