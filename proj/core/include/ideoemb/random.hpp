#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ideoemb {

// Mixes a master seed with stream coordinates (item id, epoch, restart...)
// into an independent 64-bit seed. SplitMix64 finalizer applied per word.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

// Random source used across the library. Every variate is computed from the
// raw mt19937_64 output by code in this file, so sequences are identical on
// every standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

  double normal();

  // log of a Gamma(shape, 1) variate. Stays finite for shapes well below 1,
  // where the variate itself underflows to zero.
  double log_gamma_variate(double shape);

  double gamma(double shape);
  double beta(double a, double b);
  std::vector<double> dirichlet(std::span<const double> concentration);

  // Index drawn with probability proportional to weights[k].
  std::size_t categorical(std::span<const double> weights);

  // k distinct indices from [0, n), in sampling order (partial Fisher-Yates).
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace ideoemb
