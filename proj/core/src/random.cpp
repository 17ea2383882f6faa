#include "ideoemb/random.hpp"

#include <cmath>
#include <numeric>

#include "ideoemb/errors.hpp"

namespace ideoemb {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return h;
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) throw PreconditionError("uniform_index: empty range");
  // Rejection on the largest multiple of n that fits in 64 bits.
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n + 1) % n;
  std::uint64_t x = engine_();
  while (x > limit) x = engine_();
  return x % n;
}

double Rng::normal() {
  // Marsaglia polar method; the second variate is discarded to keep the
  // stream stateless apart from the engine.
  for (;;) {
    const double u = 2.0 * uniform() - 1.0;
    const double v = 2.0 * uniform() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double Rng::log_gamma_variate(double shape) {
  if (!(shape > 0.0)) throw PreconditionError("gamma shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a), taken in log space.
    double u = uniform();
    while (u == 0.0) u = uniform();
    return log_gamma_variate(shape + 1.0) + std::log(u) / shape;
  }
  // Marsaglia & Tsang.
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return std::log(d * v);
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return std::log(d * v);
  }
}

double Rng::gamma(double shape) { return std::exp(log_gamma_variate(shape)); }

double Rng::beta(double a, double b) {
  const double lx = log_gamma_variate(a);
  const double ly = log_gamma_variate(b);
  // x / (x + y) = 1 / (1 + exp(ly - lx)), evaluated on the stable side.
  if (lx >= ly) return 1.0 / (1.0 + std::exp(ly - lx));
  const double r = std::exp(lx - ly);
  return r / (1.0 + r);
}

std::vector<double> Rng::dirichlet(std::span<const double> concentration) {
  std::vector<double> out(concentration.size());
  if (out.empty()) return out;
  double max_log = -INFINITY;
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = log_gamma_variate(concentration[k]);
    max_log = std::max(max_log, out[k]);
  }
  double total = 0.0;
  for (double& x : out) {
    x = std::exp(x - max_log);
    total += x;
  }
  for (double& x : out) x /= total;
  return out;
}

std::size_t Rng::categorical(std::span<const double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw PreconditionError("categorical: weights sum to zero");
  const double target = uniform() * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    acc += weights[k];
    last_positive = k;
    if (target < acc) return k;
  }
  return last_positive;
}

std::vector<std::uint32_t> Rng::sample_without_replacement(std::uint32_t n, std::uint32_t k) {
  if (k > n) throw PreconditionError("sample_without_replacement: k > n");
  std::vector<std::uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0U);
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::uint32_t>(uniform_index(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace ideoemb
