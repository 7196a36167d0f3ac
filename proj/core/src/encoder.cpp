#include "graphacl/encoder.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

namespace graphacl {

void EncoderParams::validate() const {
  detail::require(!weights.empty() && weights.size() <= 2,
                  "encoder: layer count must be 1 or 2");
  detail::require(slopes.size() == weights.size(), "encoder: one slope per layer");
  for (size_t l = 1; l < weights.size(); ++l)
    detail::require(weights[l - 1].cols == weights[l].rows, "encoder: layer dims do not chain");
  for (const auto& w : weights)
    detail::require(w.is_finite(), "encoder: non-finite weight");
}

DenseMatrix glorot(int fan_in, int fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  DenseMatrix w(fan_in, fan_out);
  for (auto& v : w.data) v = rng.uniform(-a, a);
  return w;
}

EncoderParams init_encoder(const std::vector<int>& dims, Rng& rng) {
  detail::require(dims.size() >= 2 && dims.size() <= 3, "init_encoder: need 1 or 2 layers");
  EncoderParams p;
  for (size_t l = 0; l + 1 < dims.size(); ++l) {
    p.weights.push_back(glorot(dims[l], dims[l + 1], rng));
    p.slopes.push_back(0.25);
  }
  return p;
}

DiscriminatorParams init_discriminator(int h, Rng& rng) {
  return DiscriminatorParams{glorot(h, h, rng)};
}

EncoderOutput encode_from_prod1(const EncoderParams& params, const SparseMatrix& a_hat,
                                DenseMatrix prod1) {
  params.validate();
  detail::require(a_hat.rows == a_hat.cols && a_hat.rows == prod1.rows,
                  "encode: A-hat and features disagree on node count");
  detail::require(prod1.cols == params.weights[0].cols, "encode: first-layer product dim");
  EncoderOutput out;
  out.prod.push_back(std::move(prod1));
  out.pre.push_back(spmm(a_hat, out.prod.back()));
  DenseMatrix act = prelu(out.pre.back(), params.slopes[0]);
  for (int l = 1; l < params.layer_count(); ++l) {
    out.hidden.push_back(std::move(act));
    out.prod.push_back(matmul(out.hidden.back(), params.weights[l]));
    out.pre.push_back(spmm(a_hat, out.prod.back()));
    act = prelu(out.pre.back(), params.slopes[l]);
  }
  out.z = std::move(act);
  auto m = mean_rows(out.z);
  out.s.resize(m.size());
  for (size_t j = 0; j < m.size(); ++j) out.s[j] = sigmoid(m[j]);
  return out;
}

EncoderOutput encode(const EncoderParams& params, const SparseMatrix& a_hat,
                     const DenseMatrix& x) {
  params.validate();
  detail::require(x.cols == params.in_dim(), "encode: feature dim != first layer in-dim");
  detail::require(a_hat.rows == a_hat.cols && a_hat.rows == x.rows,
                  "encode: A-hat and features disagree on node count");
  return encode_from_prod1(params, a_hat, matmul(x, params.weights[0]));
}

DenseMatrix permute_rows(const DenseMatrix& x, const std::vector<int>& perm) {
  detail::require(perm.size() == static_cast<size_t>(x.rows), "permute_rows: length mismatch");
  DenseMatrix out(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i)
    std::copy(x.row(perm[i]), x.row(perm[i]) + x.cols, out.row(i));
  return out;
}

AttributedGraph corrupt(const AttributedGraph& g, uint64_t seed) {
  Rng rng(seed);
  AttributedGraph out = g;
  out.features = permute_rows(g.features, rng.permutation(g.n()));
  return out;
}

double discriminate(const DiscriminatorParams& d, const std::vector<double>& z,
                    const std::vector<double>& s) {
  const int h = d.w.rows;
  detail::require(d.w.cols == h && static_cast<int>(z.size()) == h &&
                      static_cast<int>(s.size()) == h,
                  "discriminate: dimension mismatch");
  double acc = 0.0;
  for (int i = 0; i < h; ++i) acc += z[i] * dot(d.w.row(i), s.data(), h);
  return acc;
}

std::vector<double> discriminate_rows(const DiscriminatorParams& d, const DenseMatrix& z,
                                      const std::vector<double>& s) {
  const int h = d.w.rows;
  detail::require(z.cols == h && static_cast<int>(s.size()) == h,
                  "discriminate_rows: dimension mismatch");
  std::vector<double> t(h);
  for (int i = 0; i < h; ++i) t[i] = dot(d.w.row(i), s.data(), h);
  std::vector<double> logits(z.rows);
  for (int i = 0; i < z.rows; ++i) logits[i] = dot(z.row(i), t.data(), h);
  return logits;
}

PartialBackward encoder_backward_to_prod1(const EncoderParams& params, const SparseMatrix& a_hat,
                                          const EncoderOutput& out, const DenseMatrix& dz,
                                          const std::vector<double>* ds) {
  const int layers = params.layer_count();
  detail::require(static_cast<int>(out.pre.size()) == layers &&
                      static_cast<int>(out.prod.size()) == layers,
                  "encoder_backward: cache does not match parameters (stale?)");
  detail::require(out.z.rows == a_hat.rows, "encoder_backward: cache does not match inputs (stale?)");
  detail::require(dz.same_shape(out.z), "encoder_backward: upstream z-grad shape mismatch");
  detail::require(!ds || ds->size() == out.s.size(),
                  "encoder_backward: upstream s-grad shape mismatch");

  // Fold the s path into the z gradient: s = sigmoid(mean_rows(z)).
  DenseMatrix dh = dz;
  const int n = out.z.rows;
  if (ds) {
    for (size_t j = 0; j < ds->size(); ++j) {
      if ((*ds)[j] == 0.0) continue;
      const double dm = (*ds)[j] * out.s[j] * (1.0 - out.s[j]) / n;
      for (int i = 0; i < n; ++i) dh(i, static_cast<int>(j)) += dm;
    }
  }

  PartialBackward b;
  b.weights.resize(layers);
  b.slopes.resize(layers);
  b.du.resize(layers);

  for (int l = layers - 1; l >= 0; --l) {
    PreluGrad pg = prelu_backward(out.pre[l], params.slopes[l], dh);
    b.slopes[l] = pg.grad_slope;
    b.du[l] = std::move(pg.grad_x);
    DenseMatrix dp = spmm(a_hat, b.du[l]);  // A-hat is symmetric
    if (l == 0) {
      b.dp1 = std::move(dp);
    } else {
      b.weights[l] = matmul_tn(out.hidden[l - 1], dp);
      dh = matmul_nt(dp, params.weights[l]);
    }
  }
  return b;
}

EncoderGrads encoder_backward(const EncoderParams& params, const SparseMatrix& a_hat,
                              const DenseMatrix& x, const EncoderOutput& out,
                              const DenseMatrix& dz, const std::vector<double>& ds,
                              const std::vector<std::pair<int, int>>* ahat_candidates,
                              std::vector<DenseMatrix>* du_out) {
  detail::require(out.z.rows == x.rows && a_hat.rows == x.rows,
                  "encoder_backward: cache does not match inputs (stale?)");
  PartialBackward b = encoder_backward_to_prod1(params, a_hat, out, dz, &ds);

  EncoderGrads g;
  g.weights = std::move(b.weights);
  g.slopes = std::move(b.slopes);
  g.weights[0] = matmul_tn(x, b.dp1);
  g.x = matmul_nt(b.dp1, params.weights[0]);

  if (ahat_candidates) {
    g.a_hat_entries.resize(ahat_candidates->size());
    for (size_t c = 0; c < ahat_candidates->size(); ++c) {
      const auto [u, v] = (*ahat_candidates)[c];
      double acc = 0.0;
      for (int l = 0; l < params.layer_count(); ++l)
        acc += dot(b.du[l].row(u), out.prod[l].row(v), b.du[l].cols);
      g.a_hat_entries[c] = acc;
    }
  }
  if (du_out) *du_out = std::move(b.du);
  return g;
}

namespace {

void write_bytes(std::ofstream& out, const void* p, size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u32(std::ofstream& out, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  write_bytes(out, b, 4);
}

void write_f64(std::ofstream& out, double d) {
  const uint64_t v = std::bit_cast<uint64_t>(d);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  write_bytes(out, b, 8);
}

uint32_t read_u32(std::ifstream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error(path + ": truncated checkpoint");
  return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
         static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
}

double read_f64(std::ifstream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error(path + ": truncated checkpoint");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(v);
}

void write_encoder(std::ofstream& out, const EncoderParams& p) {
  write_u32(out, static_cast<uint32_t>(p.layer_count()));
  for (const auto& w : p.weights) {
    write_u32(out, static_cast<uint32_t>(w.rows));
    write_u32(out, static_cast<uint32_t>(w.cols));
    for (double v : w.data) write_f64(out, v);
  }
  for (double s : p.slopes) write_f64(out, s);
}

EncoderParams read_encoder(std::ifstream& in, const std::string& path) {
  EncoderParams p;
  const uint32_t layers = read_u32(in, path);
  if (layers < 1 || layers > 2) throw std::runtime_error(path + ": bad layer count");
  for (uint32_t l = 0; l < layers; ++l) {
    const int r = static_cast<int>(read_u32(in, path));
    const int c = static_cast<int>(read_u32(in, path));
    DenseMatrix w(r, c);
    for (auto& v : w.data) v = read_f64(in, path);
    p.weights.push_back(std::move(w));
  }
  p.slopes.resize(layers);
  for (auto& s : p.slopes) s = read_f64(in, path);
  return p;
}

double fro_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (double v : m.data) s += v * v;
  return std::sqrt(s);
}

}  // namespace

static const char kCheckpointMagic[8] = {'G', 'A', 'C', 'L', 'C', 'K', 'P', 'T'};

void save_checkpoint(const std::string& path, const Checkpoint& c) {
  std::ofstream out(path, std::ios::binary);
  detail::require(static_cast<bool>(out), "save_checkpoint: cannot open " + path);
  write_bytes(out, kCheckpointMagic, 8);
  const unsigned char version = 1;
  const unsigned char has_f2 = c.f2.has_value() ? 1 : 0;
  const unsigned char pad[2] = {0, 0};
  write_bytes(out, &version, 1);
  write_bytes(out, &has_f2, 1);
  write_bytes(out, pad, 2);
  write_encoder(out, c.f1);
  if (c.f2) write_encoder(out, *c.f2);
  write_u32(out, static_cast<uint32_t>(c.d.w.rows));
  for (double v : c.d.w.data) write_f64(out, v);
  out.close();
  detail::require(static_cast<bool>(out), "save_checkpoint: write failed for " + path);

  std::ofstream side(path + ".txt");
  side << "format: graphacl checkpoint v1\n";
  side << "encoders: " << (c.f2 ? 2 : 1) << "\n";
  for (int e = 0; e < (c.f2 ? 2 : 1); ++e) {
    const EncoderParams& p = e == 0 ? c.f1 : *c.f2;
    side << "encoder " << (e + 1) << ": layers=" << p.layer_count();
    for (const auto& w : p.weights) side << " [" << w.rows << "x" << w.cols << "]";
    side << " slopes=";
    for (size_t l = 0; l < p.slopes.size(); ++l) side << (l ? "," : "") << p.slopes[l];
    side << " frob=";
    for (size_t l = 0; l < p.weights.size(); ++l) side << (l ? "," : "") << fro_norm(p.weights[l]);
    side << "\n";
  }
  side << "discriminator: [" << c.d.w.rows << "x" << c.d.w.cols << "] frob=" << fro_norm(c.d.w)
       << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  detail::require(static_cast<bool>(in), "load_checkpoint: cannot open " + path);
  char magic[8];
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kCheckpointMagic))
    throw std::runtime_error(path + ": not a graphacl checkpoint");
  unsigned char header[4];
  if (!in.read(reinterpret_cast<char*>(header), 4))
    throw std::runtime_error(path + ": truncated checkpoint");
  if (header[0] != 1) throw std::runtime_error(path + ": unsupported checkpoint version");
  Checkpoint c;
  c.f1 = read_encoder(in, path);
  if (header[1]) c.f2 = read_encoder(in, path);
  const int h = static_cast<int>(read_u32(in, path));
  c.d.w = DenseMatrix(h, h);
  for (auto& v : c.d.w.data) v = read_f64(in, path);
  return c;
}

}  // namespace graphacl
