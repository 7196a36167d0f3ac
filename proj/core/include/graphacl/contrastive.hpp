#pragma once

#include <optional>

#include "graphacl/encoder.hpp"

namespace graphacl {

struct LossWeights {
  double alpha = 1.0;
  double beta = 1.0;
  void validate() const {
    detail::require(std::isfinite(alpha) && std::isfinite(beta) && alpha >= 0.0 && beta >= 0.0,
                    "LossWeights: alpha and beta must be finite and non-negative");
  }
};

// total = self_term + alpha*adv_local_global + beta*adv_global_local.
struct LossReport {
  double total = 0.0;
  double self_term = 0.0;
  double adv_local_global = 0.0;
  double adv_global_local = 0.0;
};

struct MiBceGrads {
  DenseMatrix z_pos, z_neg;
  std::vector<double> s;
  DenseMatrix d_w;
};

// DGI binary-cross-entropy MI estimator:
//   loss = -(1/2N) * sum_i [ log sig(D(z_pos_i, s)) + log(1 - sig(D(z_neg_i, s))) ].
double mi_bce_loss(const DiscriminatorParams& d, const DenseMatrix& z_pos,
                   const DenseMatrix& z_neg, const std::vector<double>& s,
                   MiBceGrads* grads = nullptr);

// dL/dA-hat of a bundle of encodes in factored form: sum_k du[k] p[k]^T.
struct AhatFactors {
  std::vector<DenseMatrix> du;
  std::vector<DenseMatrix> p;
  double entry(int u, int v) const {
    double acc = 0.0;
    for (size_t k = 0; k < du.size(); ++k) acc += dot(du[k].row(u), p[k].row(v), du[k].cols);
    return acc;
  }
};

struct CompositeResult {
  LossReport report;
  std::vector<DenseMatrix> f1_weights;
  std::vector<double> f1_slopes;
  std::vector<DenseMatrix> f2_weights;  // empty when the encoder is shared
  std::vector<double> f2_slopes;
  DenseMatrix d_w;
  // d(total)/dA-hat(g_adv), when requested.
  std::optional<AhatFactors> adv_factors;
};

// Whether g and g_adv share identical feature matrices. Structure-only
// perturbations can assert Same and skip an O(N*D) comparison per call.
enum class FeatureAlias { Auto, Same, Distinct };

struct CompositeOptions {
  bool want_param_grads = true;
  bool want_adv_factors = false;
  // Precomputed normalized adjacencies (either may be null).
  const SparseMatrix* a_hat_g = nullptr;
  const SparseMatrix* a_hat_adv = nullptr;
  // Overrides the seed-drawn corruption permutation when set.
  const std::vector<int>* corruption = nullptr;
  FeatureAlias features_hint = FeatureAlias::Auto;
};

// Eq. 2: self term on f1(G) plus the two crossed terms against f2(G_adv).
// One corruption permutation per evaluation (drawn from `seed`) provides the
// negatives for both local views. Pass f2 = nullptr for a shared encoder.
CompositeResult graphacl_supervised_loss(const EncoderParams& f1, const EncoderParams* f2,
                                         const DiscriminatorParams& d, const AttributedGraph& g,
                                         const AttributedGraph& g_adv, const LossWeights& w,
                                         uint64_t seed, const CompositeOptions& opt = {});

// Eq. 3: identical contract; the second view comes from the unsupervised
// attack rather than a label-based one.
CompositeResult graphacl_unsupervised_loss(const EncoderParams& f1, const EncoderParams* f2,
                                           const DiscriminatorParams& d, const AttributedGraph& g,
                                           const AttributedGraph& g_attacked, const LossWeights& w,
                                           uint64_t seed, const CompositeOptions& opt = {});

struct DgiResult {
  double loss = 0.0;
  std::vector<DenseMatrix> f_weights;
  std::vector<double> f_slopes;
  DenseMatrix d_w;
};

// Plain DGI loss (the alpha = beta = 0 reduction): one clean view against its
// corruption. Used directly by the DGI training path.
DgiResult dgi_loss(const EncoderParams& f, const DiscriminatorParams& d, const AttributedGraph& g,
                   const SparseMatrix& a_hat, uint64_t seed, bool want_grads = true);

// Precomputed clean-side quantities of the Eq. 18 attack objective
//   I[f1(G)_global, f2(g(G))] + I[f1(G), f2(g(G))_global],
// fixed while the encoders and the clean graph stay fixed.
struct Eq18Cache {
  std::vector<int> perm;
  DenseMatrix z1, z1c;
  std::vector<double> s1;
  DenseMatrix m_adv;       // first-layer prod of the adversarial view
  DenseMatrix m_adv_perm;  // corrupted variant
};

Eq18Cache make_eq18_cache(const EncoderParams& f1, const EncoderParams& f2,
                          const AttributedGraph& g, const SparseMatrix& a_hat_g, uint64_t seed);

struct Eq18Eval {
  double value = 0.0;  // adv_local_global + adv_global_local, unweighted
  double adv_local_global = 0.0;
  double adv_global_local = 0.0;
  std::optional<AhatFactors> factors;  // d(value)/dA-hat(g_adv)
};

Eq18Eval eq18_objective(const Eq18Cache& cache, const EncoderParams& f2,
                        const DiscriminatorParams& d, const SparseMatrix& a_hat_adv,
                        bool want_factors);

}  // namespace graphacl
