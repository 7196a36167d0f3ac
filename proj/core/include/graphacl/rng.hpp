#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace graphacl {

// Deterministic random source. Raw bits come from std::mt19937_64 (fully
// specified by the standard); all distributions are implemented here rather
// than through std:: distribution objects, whose output is
// implementation-defined.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n), unbiased (Lemire rejection).
  int uniform_int(int n);

  // Standard normal via Box-Muller (caches the spare draw).
  double normal();

  std::vector<int> permutation(int n);
  void shuffle(std::vector<int>& v);

 private:
  std::mt19937_64 eng_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derives the seed of a named sub-generator from a master seed, so the
// independent random streams (init, corruption, attack, probe, ...) can be
// varied in isolation.
uint64_t derive_seed(uint64_t seed, std::string_view name);

inline Rng sub_rng(uint64_t seed, std::string_view name) { return Rng(derive_seed(seed, name)); }

}  // namespace graphacl
