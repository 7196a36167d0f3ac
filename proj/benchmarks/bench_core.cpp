// Hot-path benchmarks at citation-network scale (~2.7k nodes, 1.4k features):
// the kernels that dominate training (sparse propagation, dense products,
// encoding, the MI estimator) and attacking (factored gradient scans).
#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "graphacl/attack.hpp"
#include "graphacl/contrastive.hpp"
#include "graphacl/encoder.hpp"
#include "graphacl/graph.hpp"
#include "graphacl/rng.hpp"
#include "graphacl/synth.hpp"

using namespace graphacl;

namespace {

struct Fixture {
  AttributedGraph g;
  SparseMatrix a_hat;
  EncoderParams f;
  DiscriminatorParams d;
  SurrogateModel surrogate;

  Fixture() : g(synth_planetoid(cora_like())), a_hat(normalize_adjacency(g)) {
    const int h = 64;
    Rng rng(41);
    DenseMatrix w(g.features.cols, h);
    for (double& v : w.data) v = 0.05 * rng.normal();
    f.weights = {std::move(w)};
    f.slopes = {0.25};
    d.w = DenseMatrix(h, h);
    for (double& v : d.w.data) v = 0.1 * rng.normal();
    surrogate = train_surrogate(g, 20, 0.5, 0);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_normalize_adjacency(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(normalize_adjacency(fx.g));
}

void BM_spmm(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(spmm(fx.a_hat, fx.g.features));
}

void BM_matmul(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(matmul(fx.g.features, fx.f.weights[0]));
}

void BM_encode(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(encode(fx.f, fx.a_hat, fx.g.features));
}

void BM_mi_bce_loss(benchmark::State& state) {
  const Fixture& fx = fixture();
  const EncoderOutput pos = encode(fx.f, fx.a_hat, fx.g.features);
  const EncoderOutput neg = encode(fx.f, fx.a_hat, corrupt(fx.g, 7).features);
  MiBceGrads grads;
  for (auto _ : state)
    benchmark::DoNotOptimize(mi_bce_loss(fx.d, pos.z, neg.z, pos.s, &grads));
}

void BM_dgi_loss(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(dgi_loss(fx.f, fx.d, fx.g, fx.a_hat, 7, true));
}

void BM_surrogate_train(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(train_surrogate(fx.g, 10, 0.5, 0));
}

// One full gradient scan of the supervised attack: factored dL/dA-hat chained
// through the normalization for every node pair.
void BM_structure_gradient_scan(benchmark::State& state) {
  const Fixture& fx = fixture();
  const std::vector<int> labels = surrogate_predictions(fx.surrogate, fx.g);
  const std::vector<uint8_t> mask(static_cast<size_t>(fx.g.n()), 1);
  AhatFactors factors;
  surrogate_objective(fx.surrogate, fx.a_hat, fx.g.features, labels, mask, &factors);
  std::vector<std::pair<int, int>> candidates;
  candidates.reserve(static_cast<size_t>(fx.g.n()) * 64);
  for (int i = 0; i < fx.g.n(); ++i)
    for (int j = i + 1; j < std::min(fx.g.n(), i + 65); ++j) candidates.emplace_back(i, j);
  for (auto _ : state)
    benchmark::DoNotOptimize(structure_gradient(factors, fx.g, fx.a_hat, candidates));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(candidates.size()));
}

void BM_targeted_attack(benchmark::State& state) {
  const Fixture& fx = fixture();
  for (auto _ : state)
    benchmark::DoNotOptimize(targeted_attack(fx.g, 42, 2, fx.surrogate, 0));
}

BENCHMARK(BM_normalize_adjacency)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_spmm)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matmul)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_encode)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mi_bce_loss)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dgi_loss)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_surrogate_train)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_structure_gradient_scan)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_targeted_attack)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
