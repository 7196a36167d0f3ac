#include "graphacl/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace graphacl {

int Rng::uniform_int(int n) {
  if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
  const uint64_t un = static_cast<uint64_t>(n);
  uint64_t x = next_u64();
  __uint128_t m = static_cast<__uint128_t>(x) * un;
  uint64_t lo = static_cast<uint64_t>(m);
  if (lo < un) {
    const uint64_t threshold = (0 - un) % un;
    while (lo < threshold) {
      x = next_u64();
      m = static_cast<__uint128_t>(x) * un;
      lo = static_cast<uint64_t>(m);
    }
  }
  return static_cast<int>(m >> 64);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1-uniform() lies in (0, 1], keeping the log argument positive.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  shuffle(p);
  return p;
}

void Rng::shuffle(std::vector<int>& v) {
  for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
    const int j = uniform_int(i + 1);
    std::swap(v[i], v[j]);
  }
}

namespace {
uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
}  // namespace

uint64_t derive_seed(uint64_t seed, std::string_view name) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a 64
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return splitmix64(splitmix64(seed) ^ h);
}

}  // namespace graphacl
