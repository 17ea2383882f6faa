#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/graph.hpp"
#include "ideoemb/model.hpp"
#include "ideoemb/random.hpp"

namespace ideoemb {

struct TrainConfig {
  std::size_t epochs = 50;
  double lr_init = 0.1;
  double lr_floor = 0.01;
  std::size_t seed_sample_size = 10;  // activators drawn per item and epoch
  double negative_ratio = 2.0;        // negatives per positive
  double clamp_eps = 1e-4;            // parameters kept in [eps, 1 - eps]
  std::size_t restarts = 1;
  std::uint64_t rng_seed = 1;

  void validate() const;

  // Step size of epoch `epoch`: linear from lr_init (first) to lr_floor (last).
  double learning_rate(std::size_t epoch) const;
};

// <gamma_i, v, u> with label y: v is an active in-neighbor of u; y = 1 when u
// activated strictly after v, y = 0 when u never activated on the item.
struct TrainExample {
  ItemId item = 0;
  NodeId v = 0;
  NodeId u = 0;
  bool y = false;

  friend bool operator==(const TrainExample&, const TrainExample&) = default;
};

// Appends the examples of one cascade. Activators are sampled uniformly
// without replacement (min(seed_sample_size, |D_i|) of them) and visited in
// cascade order. For each one: every follower that activated later is a
// positive; round(negative_ratio * positives) inactive followers, capped by
// availability, are drawn without replacement as negatives.
void append_cascade_examples(const DirectedGraph& g, std::span<const Activation> cascade,
                             std::size_t seed_sample_size, double negative_ratio, Rng& rng,
                             std::vector<TrainExample>& out);

// append_cascade_examples over `item_ids` in the given order.
std::vector<TrainExample> build_examples(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> item_ids, const TrainConfig& cfg, Rng& rng);

// Convenience overload over every item of the log.
std::vector<TrainExample> build_examples(const DirectedGraph& g, const ActivationLog& log, const TrainConfig& cfg,
                                         Rng& rng);

// Fixed example draw on which fit() traces the objective and selects among
// restarts.
std::vector<TrainExample> selection_examples(const DirectedGraph& g, const ActivationLog& log,
                                             std::span<const ItemId> item_ids, const TrainConfig& cfg);

// The exact example multiset fit() streams in (restart, epoch).
std::vector<TrainExample> epoch_examples(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> item_ids, const TrainConfig& cfg,
                                         std::size_t restart, std::size_t epoch);

// Pair activation probability clamped to [1e-9, 1 - 1e-9].
double example_prob(const TrainExample& x, std::span<const ItemTopics> items, const EmbeddingTable& emb);

// Log-likelihood of x (probability clamped) and its gradient with respect to
// the 3K parameters it touches.
struct ExampleGradient {
  NodeId u = 0;
  NodeId v = 0;
  double loglik = 0.0;
  std::vector<double> theta_u;
  std::vector<double> phi_u;
  std::vector<double> phi_v;
};

ExampleGradient example_gradient(const TrainExample& x, std::span<const ItemTopics> items,
                                 const EmbeddingTable& emb);

// Sum of per-example log-likelihoods.
double examples_loglik(std::span<const TrainExample> examples, std::span<const ItemTopics> items,
                       const EmbeddingTable& emb);

// Per-parameter AdaGrad ascent on single examples. Each update touches only
// theta[u], phi[u] and phi[v], and clamps them to [clamp_eps, 1 - clamp_eps].
class AdaGradAscent {
 public:
  AdaGradAscent(std::size_t node_count, std::size_t topic_count, double clamp_eps, double epsilon = 1e-10);

  // Applies one step of size `lr` to `emb`; returns the example's
  // log-likelihood before the step.
  double update(const TrainExample& x, std::span<const double> gamma, EmbeddingTable& emb, double lr);

 private:
  std::size_t topics_;
  double lo_;
  double hi_;
  double epsilon_;
  std::vector<double> theta_accum_;
  std::vector<double> phi_accum_;
  std::vector<double> g_theta_;
  std::vector<double> g_phi_u_;
  std::vector<double> g_phi_v_;
};

struct EpochTrace {
  std::size_t restart = 0;
  std::size_t epoch = 0;
  double learning_rate = 0.0;
  std::size_t examples = 0;  // examples streamed this epoch
  // Mean log-likelihood of selection_examples() under the end-of-epoch
  // parameters.
  double mean_loglik = 0.0;
};

struct FitResult {
  EmbeddingTable embeddings;
  std::vector<EpochTrace> trace;
  // Selection objective (mean log-likelihood on a shared example draw) of
  // every restart.
  std::vector<double> restart_objectives;
  std::size_t best_restart = 0;
};

// Per-parameter AdaGrad ascent with a linearly decaying global step.
FitResult fit(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
              std::span<const ItemId> train_items, const TrainConfig& cfg);

// Trains on every item.
FitResult fit(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
              const TrainConfig& cfg);

}  // namespace ideoemb
