#include "graphacl/contrastive.hpp"

#include <cmath>

namespace graphacl {

double mi_bce_loss(const DiscriminatorParams& d, const DenseMatrix& z_pos,
                   const DenseMatrix& z_neg, const std::vector<double>& s, MiBceGrads* grads) {
  detail::require(z_pos.same_shape(z_neg), "mi_bce_loss: positive/negative shape mismatch");
  const int n = z_pos.rows;
  const int h = z_pos.cols;
  detail::require(n > 0, "mi_bce_loss: empty batch");
  detail::require(d.w.rows == h && d.w.cols == h && static_cast<int>(s.size()) == h,
                  "mi_bce_loss: discriminator/summary dimension mismatch");

  std::vector<double> t(h);
  for (int i = 0; i < h; ++i) t[i] = dot(d.w.row(i), s.data(), h);

  const double scale = 1.0 / (2.0 * n);
  double acc = 0.0;
  std::vector<double> pos(n), neg(n);
  for (int i = 0; i < n; ++i) {
    pos[i] = dot(z_pos.row(i), t.data(), h);
    neg[i] = dot(z_neg.row(i), t.data(), h);
    acc += log_sigmoid(pos[i]) + log_sigmoid(-neg[i]);
  }
  const double loss = -acc * scale;

  if (grads) {
    grads->z_pos = DenseMatrix(n, h);
    grads->z_neg = DenseMatrix(n, h);
    std::vector<double> dt(h, 0.0);
    for (int i = 0; i < n; ++i) {
      const double dpos = -scale * sigmoid(-pos[i]);
      const double dneg = scale * sigmoid(neg[i]);
      for (int j = 0; j < h; ++j) {
        grads->z_pos(i, j) = dpos * t[j];
        grads->z_neg(i, j) = dneg * t[j];
        dt[j] += dpos * z_pos(i, j) + dneg * z_neg(i, j);
      }
    }
    grads->d_w = DenseMatrix(h, h);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) grads->d_w(i, j) = dt[i] * s[j];
    grads->s.assign(h, 0.0);
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < h; ++j) grads->s[j] += d.w(i, j) * dt[i];
  }
  return loss;
}

namespace {

DenseMatrix unpermute_rows(const DenseMatrix& x, const std::vector<int>& perm) {
  DenseMatrix out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i)
    std::copy(x.row(i), x.row(i) + x.cols, out.row(perm[i]));
  return out;
}

void add_to(DenseMatrix& a, const DenseMatrix& b) {
  detail::require(a.same_shape(b), "gradient accumulation shape mismatch");
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void axpy_mat(DenseMatrix& a, double c, const DenseMatrix& b) {
  detail::require(a.same_shape(b), "gradient accumulation shape mismatch");
  for (size_t i = 0; i < a.data.size(); ++i) a.data[i] += c * b.data[i];
}

DenseMatrix scaled(double c, const DenseMatrix& m) {
  DenseMatrix out(m.rows, m.cols);
  for (size_t i = 0; i < m.data.size(); ++i) out.data[i] = c * m.data[i];
  return out;
}

std::vector<int> corruption_perm(const CompositeOptions& opt, uint64_t seed, int n) {
  if (opt.corruption) {
    detail::require(static_cast<int>(opt.corruption->size()) == n,
                    "composite loss: corruption permutation length mismatch");
    std::vector<uint8_t> seen(n, 0);
    for (int v : *opt.corruption) {
      detail::require(v >= 0 && v < n && !seen[v],
                      "composite loss: corruption override is not a permutation");
      seen[v] = 1;
    }
    return *opt.corruption;
  }
  return Rng(seed).permutation(n);
}

CompositeResult composite_loss(const EncoderParams& f1, const EncoderParams* f2,
                               const DiscriminatorParams& d, const AttributedGraph& g,
                               const AttributedGraph& g_adv, const LossWeights& w, uint64_t seed,
                               const CompositeOptions& opt) {
  w.validate();
  detail::require(g.n() == g_adv.n(), "composite loss: node-count mismatch between views");
  const bool shared = f2 == nullptr || f2 == &f1;
  const EncoderParams& fa = shared ? f1 : *f2;
  detail::require(fa.embedding_dim() == f1.embedding_dim(),
                  "composite loss: encoder embedding dims differ");

  SparseMatrix ahat_g_local, ahat_a_local;
  const SparseMatrix* ahat_g = opt.a_hat_g;
  if (!ahat_g) {
    ahat_g_local = normalize_adjacency(g);
    ahat_g = &ahat_g_local;
  }
  const SparseMatrix* ahat_a = opt.a_hat_adv;
  if (!ahat_a) {
    ahat_a_local = normalize_adjacency(g_adv);
    ahat_a = &ahat_a_local;
  }
  detail::require(ahat_g->rows == g.n() && ahat_a->rows == g.n(),
                  "composite loss: A-hat size mismatch");

  const int n = g.n();
  const std::vector<int> perm = corruption_perm(opt, seed, n);

  bool same_x = false;
  switch (opt.features_hint) {
    case FeatureAlias::Same:
      detail::require(g_adv.features.same_shape(g.features),
                      "composite loss: features_hint Same but shapes differ");
      same_x = true;
      break;
    case FeatureAlias::Distinct:
      same_x = false;
      break;
    case FeatureAlias::Auto:
      same_x = &g_adv.features == &g.features ||
               (g_adv.features.same_shape(g.features) && g_adv.features.data == g.features.data);
      break;
  }

  DenseMatrix m1 = matmul(g.features, f1.weights[0]);
  const bool share_m = shared && same_x;
  DenseMatrix m2 = share_m ? m1 : matmul(g_adv.features, fa.weights[0]);

  EncoderOutput e1c = encode_from_prod1(f1, *ahat_g, permute_rows(m1, perm));
  EncoderOutput e2c = encode_from_prod1(fa, *ahat_a, permute_rows(m2, perm));
  EncoderOutput e2 = encode_from_prod1(fa, *ahat_a, std::move(m2));
  EncoderOutput e1 = encode_from_prod1(f1, *ahat_g, std::move(m1));

  const bool want_any = opt.want_param_grads || opt.want_adv_factors;
  MiBceGrads g_self, g_lg, g_gl;
  CompositeResult res;
  res.report.self_term = mi_bce_loss(d, e1.z, e1c.z, e1.s, want_any ? &g_self : nullptr);
  res.report.adv_local_global = mi_bce_loss(d, e1.z, e1c.z, e2.s, want_any ? &g_lg : nullptr);
  res.report.adv_global_local = mi_bce_loss(d, e2.z, e2c.z, e1.s, want_any ? &g_gl : nullptr);
  res.report.total = res.report.self_term + w.alpha * res.report.adv_local_global +
                     w.beta * res.report.adv_global_local;
  if (!want_any) return res;

  // Upstreams of the adversarial-view bundles.
  DenseMatrix dz2 = scaled(w.beta, g_gl.z_pos);
  DenseMatrix dz2c = scaled(w.beta, g_gl.z_neg);
  std::vector<double> ds2(g_lg.s.size());
  for (size_t j = 0; j < ds2.size(); ++j) ds2[j] = w.alpha * g_lg.s[j];
  PartialBackward ba = encoder_backward_to_prod1(fa, *ahat_a, e2, dz2, &ds2);
  PartialBackward bac = encoder_backward_to_prod1(fa, *ahat_a, e2c, dz2c, nullptr);

  if (opt.want_param_grads) {
    res.d_w = std::move(g_self.d_w);
    if (w.alpha != 0.0) axpy_mat(res.d_w, w.alpha, g_lg.d_w);
    if (w.beta != 0.0) axpy_mat(res.d_w, w.beta, g_gl.d_w);

    DenseMatrix dz1 = std::move(g_self.z_pos);
    if (w.alpha != 0.0) axpy_mat(dz1, w.alpha, g_lg.z_pos);
    DenseMatrix dz1c = std::move(g_self.z_neg);
    if (w.alpha != 0.0) axpy_mat(dz1c, w.alpha, g_lg.z_neg);
    std::vector<double> ds1 = std::move(g_self.s);
    if (w.beta != 0.0)
      for (size_t j = 0; j < ds1.size(); ++j) ds1[j] += w.beta * g_gl.s[j];

    PartialBackward b1 = encoder_backward_to_prod1(f1, *ahat_g, e1, dz1, &ds1);
    PartialBackward b1c = encoder_backward_to_prod1(f1, *ahat_g, e1c, dz1c, nullptr);

    res.f1_weights = std::move(b1.weights);
    res.f1_slopes = std::move(b1.slopes);
    for (int l = 1; l < f1.layer_count(); ++l) add_to(res.f1_weights[l], b1c.weights[l]);
    for (int l = 0; l < f1.layer_count(); ++l) res.f1_slopes[l] += b1c.slopes[l];

    DenseMatrix dm_g = std::move(b1.dp1);
    add_to(dm_g, unpermute_rows(b1c.dp1, perm));
    DenseMatrix dm_a = std::move(ba.dp1);
    add_to(dm_a, unpermute_rows(bac.dp1, perm));

    if (shared) {
      for (int l = 1; l < f1.layer_count(); ++l) {
        add_to(res.f1_weights[l], ba.weights[l]);
        add_to(res.f1_weights[l], bac.weights[l]);
      }
      for (int l = 0; l < f1.layer_count(); ++l)
        res.f1_slopes[l] += ba.slopes[l] + bac.slopes[l];
      if (share_m) {
        add_to(dm_g, dm_a);
        res.f1_weights[0] = matmul_tn(g.features, dm_g);
      } else {
        res.f1_weights[0] = matmul_tn(g.features, dm_g);
        add_to(res.f1_weights[0], matmul_tn(g_adv.features, dm_a));
      }
    } else {
      res.f1_weights[0] = matmul_tn(g.features, dm_g);
      res.f2_weights = std::move(ba.weights);
      res.f2_slopes = std::move(ba.slopes);
      for (int l = 1; l < fa.layer_count(); ++l) add_to(res.f2_weights[l], bac.weights[l]);
      for (int l = 0; l < fa.layer_count(); ++l) res.f2_slopes[l] += bac.slopes[l];
      res.f2_weights[0] = matmul_tn(g_adv.features, dm_a);
    }
  }

  if (opt.want_adv_factors) {
    AhatFactors f;
    for (auto& m : ba.du) f.du.push_back(std::move(m));
    for (auto& m : bac.du) f.du.push_back(std::move(m));
    for (auto& m : e2.prod) f.p.push_back(std::move(m));
    for (auto& m : e2c.prod) f.p.push_back(std::move(m));
    res.adv_factors = std::move(f);
  }
  return res;
}

}  // namespace

CompositeResult graphacl_supervised_loss(const EncoderParams& f1, const EncoderParams* f2,
                                         const DiscriminatorParams& d, const AttributedGraph& g,
                                         const AttributedGraph& g_adv, const LossWeights& w,
                                         uint64_t seed, const CompositeOptions& opt) {
  return composite_loss(f1, f2, d, g, g_adv, w, seed, opt);
}

CompositeResult graphacl_unsupervised_loss(const EncoderParams& f1, const EncoderParams* f2,
                                           const DiscriminatorParams& d, const AttributedGraph& g,
                                           const AttributedGraph& g_attacked, const LossWeights& w,
                                           uint64_t seed, const CompositeOptions& opt) {
  return composite_loss(f1, f2, d, g, g_attacked, w, seed, opt);
}

DgiResult dgi_loss(const EncoderParams& f, const DiscriminatorParams& d, const AttributedGraph& g,
                   const SparseMatrix& a_hat, uint64_t seed, bool want_grads) {
  detail::require(a_hat.rows == g.n(), "dgi_loss: A-hat size mismatch");
  const std::vector<int> perm = Rng(seed).permutation(g.n());

  DenseMatrix m = matmul(g.features, f.weights[0]);
  EncoderOutput ec = encode_from_prod1(f, a_hat, permute_rows(m, perm));
  EncoderOutput e = encode_from_prod1(f, a_hat, std::move(m));

  DgiResult res;
  MiBceGrads gr;
  res.loss = mi_bce_loss(d, e.z, ec.z, e.s, want_grads ? &gr : nullptr);
  if (!want_grads) return res;

  PartialBackward b = encoder_backward_to_prod1(f, a_hat, e, gr.z_pos, &gr.s);
  PartialBackward bc = encoder_backward_to_prod1(f, a_hat, ec, gr.z_neg, nullptr);

  res.f_weights = std::move(b.weights);
  res.f_slopes = std::move(b.slopes);
  for (int l = 1; l < f.layer_count(); ++l) add_to(res.f_weights[l], bc.weights[l]);
  for (int l = 0; l < f.layer_count(); ++l) res.f_slopes[l] += bc.slopes[l];
  DenseMatrix dm = std::move(b.dp1);
  add_to(dm, unpermute_rows(bc.dp1, perm));
  res.f_weights[0] = matmul_tn(g.features, dm);
  res.d_w = std::move(gr.d_w);
  return res;
}

Eq18Cache make_eq18_cache(const EncoderParams& f1, const EncoderParams& f2,
                          const AttributedGraph& g, const SparseMatrix& a_hat_g, uint64_t seed) {
  detail::require(a_hat_g.rows == g.n(), "make_eq18_cache: A-hat size mismatch");
  detail::require(f2.embedding_dim() == f1.embedding_dim(),
                  "make_eq18_cache: encoder embedding dims differ");
  Eq18Cache cache;
  cache.perm = Rng(seed).permutation(g.n());

  DenseMatrix m1 = matmul(g.features, f1.weights[0]);
  EncoderOutput e1c = encode_from_prod1(f1, a_hat_g, permute_rows(m1, cache.perm));
  cache.z1c = std::move(e1c.z);

  const bool same_w1 = &f2 == &f1 || (f2.weights[0].same_shape(f1.weights[0]) &&
                                      f2.weights[0].data == f1.weights[0].data);
  if (same_w1) {
    EncoderOutput e1 = encode_from_prod1(f1, a_hat_g, DenseMatrix(m1));
    cache.z1 = std::move(e1.z);
    cache.s1 = std::move(e1.s);
    cache.m_adv = std::move(m1);
  } else {
    EncoderOutput e1 = encode_from_prod1(f1, a_hat_g, std::move(m1));
    cache.z1 = std::move(e1.z);
    cache.s1 = std::move(e1.s);
    cache.m_adv = matmul(g.features, f2.weights[0]);
  }
  cache.m_adv_perm = permute_rows(cache.m_adv, cache.perm);
  return cache;
}

Eq18Eval eq18_objective(const Eq18Cache& cache, const EncoderParams& f2,
                        const DiscriminatorParams& d, const SparseMatrix& a_hat_adv,
                        bool want_factors) {
  detail::require(cache.m_adv.rows == a_hat_adv.rows,
                  "eq18_objective: cache does not match graph (stale?)");
  detail::require(cache.m_adv.cols == f2.weights[0].cols,
                  "eq18_objective: cache does not match encoder (stale?)");

  EncoderOutput e2 = encode_from_prod1(f2, a_hat_adv, DenseMatrix(cache.m_adv));
  EncoderOutput e2c = encode_from_prod1(f2, a_hat_adv, DenseMatrix(cache.m_adv_perm));

  Eq18Eval out;
  MiBceGrads g_lg, g_gl;
  out.adv_local_global = mi_bce_loss(d, cache.z1, cache.z1c, e2.s, want_factors ? &g_lg : nullptr);
  out.adv_global_local = mi_bce_loss(d, e2.z, e2c.z, cache.s1, want_factors ? &g_gl : nullptr);
  out.value = out.adv_local_global + out.adv_global_local;
  if (!want_factors) return out;

  PartialBackward ba = encoder_backward_to_prod1(f2, a_hat_adv, e2, g_gl.z_pos, &g_lg.s);
  PartialBackward bac = encoder_backward_to_prod1(f2, a_hat_adv, e2c, g_gl.z_neg, nullptr);
  AhatFactors f;
  for (auto& m : ba.du) f.du.push_back(std::move(m));
  for (auto& m : bac.du) f.du.push_back(std::move(m));
  for (auto& m : e2.prod) f.p.push_back(std::move(m));
  for (auto& m : e2c.prod) f.p.push_back(std::move(m));
  out.factors = std::move(f);
  return out;
}

}  // namespace graphacl
