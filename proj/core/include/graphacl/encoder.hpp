#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphacl/graph.hpp"
#include "graphacl/numerics.hpp"
#include "graphacl/rng.hpp"

namespace graphacl {

// GCN encoder parameters: Z = PReLU(A-hat * (...) * W_l), one or two layers,
// one shared learnable slope per layer.
struct EncoderParams {
  std::vector<DenseMatrix> weights;  // W_l: in-dim x out-dim
  std::vector<double> slopes;

  int layer_count() const { return static_cast<int>(weights.size()); }
  int in_dim() const { return weights.front().rows; }
  int embedding_dim() const { return weights.back().cols; }
  void validate() const;
};

struct DiscriminatorParams {
  DenseMatrix w;  // h x h bilinear form
};

// Uniform Glorot init, +-sqrt(6/(fan_in+fan_out)).
DenseMatrix glorot(int fan_in, int fan_out, Rng& rng);

// dims = {D, h} or {D, h1, h2}; slopes start at 0.25.
EncoderParams init_encoder(const std::vector<int>& dims, Rng& rng);
DiscriminatorParams init_discriminator(int h, Rng& rng);

// Forward result plus the caches backward needs.
struct EncoderOutput {
  DenseMatrix z;          // N x h node embeddings
  std::vector<double> s;  // sigmoid(mean over rows of z)
  std::vector<DenseMatrix> prod;    // P_l = H_{l-1} W_l
  std::vector<DenseMatrix> pre;     // U_l = A-hat P_l (pre-activation)
  std::vector<DenseMatrix> hidden;  // H_l for 1 <= l < layer_count
};

EncoderOutput encode(const EncoderParams& params, const SparseMatrix& a_hat,
                     const DenseMatrix& x);

// Forward pass with the first-layer product P_1 = X W_1 supplied by the
// caller. Lets views that differ only by a row permutation of X share one
// X W_1 product: (P X) W = P (X W) row for row.
EncoderOutput encode_from_prod1(const EncoderParams& params, const SparseMatrix& a_hat,
                                DenseMatrix prod1);

// DGI-style corruption: feature rows permuted by a seeded uniform random
// permutation; structure, labels and masks untouched.
AttributedGraph corrupt(const AttributedGraph& g, uint64_t seed);
DenseMatrix permute_rows(const DenseMatrix& x, const std::vector<int>& perm);

// Bilinear critic D(z, s) = z . (W s).
double discriminate(const DiscriminatorParams& d, const std::vector<double>& z,
                    const std::vector<double>& s);
// One logit per row of z.
std::vector<double> discriminate_rows(const DiscriminatorParams& d, const DenseMatrix& z,
                                      const std::vector<double>& s);

struct EncoderGrads {
  std::vector<DenseMatrix> weights;
  std::vector<double> slopes;
  DenseMatrix x;
  std::vector<double> a_hat_entries;  // aligned with the candidate list
};

// Exact reverse-mode gradients of a scalar loss with upstream dz (N x h) and
// ds (h). The gradient w.r.t. A-hat is dL/dA-hat = sum_l dU_l P_l^T; it is
// returned densely restricted to `ahat_candidates` ((u,v) directed entries),
// and the dU_l factors are exposed through `du_out` for callers that stream
// over many entries (P_l lives in `out.prod`).
EncoderGrads encoder_backward(const EncoderParams& params, const SparseMatrix& a_hat,
                              const DenseMatrix& x, const EncoderOutput& out,
                              const DenseMatrix& dz, const std::vector<double>& ds,
                              const std::vector<std::pair<int, int>>* ahat_candidates = nullptr,
                              std::vector<DenseMatrix>* du_out = nullptr);

// Backward stopped above the first-layer input: everything except dW_1 and
// dX, plus dL/dP_1 so callers can batch the X^T(...) product across views
// sharing the same X. weights[0] is left empty; `du` holds the dU_l factors.
struct PartialBackward {
  std::vector<DenseMatrix> weights;
  std::vector<double> slopes;
  DenseMatrix dp1;
  std::vector<DenseMatrix> du;
};

PartialBackward encoder_backward_to_prod1(const EncoderParams& params, const SparseMatrix& a_hat,
                                          const EncoderOutput& out, const DenseMatrix& dz,
                                          const std::vector<double>* ds);

// Parameter checkpoint: little-endian binary (magic, version byte, dims,
// float64 arrays) plus a human-readable sidecar at path + ".txt".
struct Checkpoint {
  EncoderParams f1;
  std::optional<EncoderParams> f2;
  DiscriminatorParams d;
};

void save_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace graphacl
