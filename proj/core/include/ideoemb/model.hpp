#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/graph.hpp"

namespace ideoemb {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-9;

double clamp_probability(double p);

// Topic mixture gamma_i of one item over K ideological axes.
class ItemTopics {
 public:
  ItemTopics() = default;
  // Throws ShapeError for K = 0, DomainError for a negative entry and
  // ValidationError when the entries do not sum to 1 within 1e-9.
  ItemTopics(ItemId item_id, std::vector<double> gamma);

  ItemId item_id() const { return item_id_; }
  std::size_t topic_count() const { return gamma_.size(); }
  std::span<const double> gamma() const { return gamma_; }
  double operator[](std::size_t k) const { return gamma_[k]; }

 private:
  ItemId item_id_ = 0;
  std::vector<double> gamma_;
};

// Per-node interests theta (|V| x K) and polarities phi (|V| x K), stored
// row-major. theta[u][k] is the chance u cares about axis k; phi[u][k] the
// chance u leans positive on it.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t node_count, std::size_t topic_count, double fill = 0.5);
  // Throws ShapeError on size mismatch, DomainError on an entry outside [0,1].
  EmbeddingTable(std::size_t node_count, std::size_t topic_count, std::vector<double> theta,
                 std::vector<double> phi);

  std::size_t node_count() const { return nodes_; }
  std::size_t topic_count() const { return topics_; }

  std::span<const double> theta(NodeId u) const { return {theta_.data() + u * topics_, topics_}; }
  std::span<const double> phi(NodeId u) const { return {phi_.data() + u * topics_, topics_}; }
  std::span<double> theta(NodeId u) { return {theta_.data() + u * topics_, topics_}; }
  std::span<double> phi(NodeId u) { return {phi_.data() + u * topics_, topics_}; }

  std::span<const double> theta_data() const { return theta_; }
  std::span<const double> phi_data() const { return phi_; }
  std::span<double> theta_data() { return theta_; }
  std::span<double> phi_data() { return phi_; }

  // phi[u][k] -> 1 - phi[u][k] for every node.
  void flip_polarity(std::size_t k);

  friend bool operator==(const EmbeddingTable&, const EmbeddingTable&) = default;

 private:
  std::size_t nodes_ = 0;
  std::size_t topics_ = 0;
  std::vector<double> theta_;
  std::vector<double> phi_;
};

// Weights pi_{i,v} over the candidate activators of an exposed node.
class ExposurePrior {
 public:
  enum class Kind { kUniform, kFirstActivator, kCustomWeights };

  ExposurePrior() = default;
  static ExposurePrior uniform() { return {}; }
  static ExposurePrior first_activator();
  // Per-node non-negative weights, renormalized over each activator set.
  static ExposurePrior custom(std::vector<double> node_weights);

  Kind kind() const { return kind_; }

  // Weights over `activators` (ordered by activation time); non-negative,
  // summing to one. Throws PreconditionError on an empty set.
  std::vector<double> weights(std::span<const NodeId> activators) const;

 private:
  Kind kind_ = Kind::kUniform;
  std::vector<double> node_weights_;
};

// Probability that u and v draw equal attitudes on one axis.
double alignment_prob(double phi_u, double phi_v);

namespace detail {

// Unvalidated kernels shared by the public entry points and the trainer's
// inner loop, so both produce bit-identical values.
inline double alignment_unchecked(double phi_u, double phi_v) {
  return phi_u * phi_v + (1.0 - phi_u) * (1.0 - phi_v);
}

inline double pair_prob_unchecked(std::span<const double> gamma, const double* theta_u,
                                  const double* phi_u, const double* phi_v) {
  double p = 0.0;
  for (std::size_t k = 0; k < gamma.size(); ++k)
    p += gamma[k] * theta_u[k] * alignment_unchecked(phi_u[k], phi_v[k]);
  return p;
}

}  // namespace detail

// Pr(u activates | v active) = sum_k gamma_k theta_u[k] alignment(phi_u[k], phi_v[k]).
double pair_activation_prob(const ItemTopics& gamma, std::span<const double> theta_u,
                            std::span<const double> phi_u, std::span<const double> phi_v);
double pair_activation_prob(const ItemTopics& gamma, NodeId u, NodeId v, const EmbeddingTable& emb);

// Prior-weighted mixture over the activators of u.
double mixture_activation_prob(const ItemTopics& gamma, NodeId u, std::span<const NodeId> activators,
                               const ExposurePrior& prior, const EmbeddingTable& emb);

// Exposure sets F_{i,u} of one cascade. Only nodes with a non-empty set are
// listed. An active node's activators are its in-neighbors that activated
// strictly earlier; an inactive node's activators are all its active
// in-neighbors. Activators are ordered by activation time, ties by the
// cascade's own order.
struct CascadeExposure {
  struct Exposed {
    NodeId node = 0;
    bool active = false;
    std::vector<NodeId> activators;
  };

  ItemId item = 0;
  std::vector<NodeId> active;  // D_i in activation order
  std::vector<Exposed> exposed;
};

CascadeExposure build_exposure(const DirectedGraph& g, std::span<const Activation> cascade);

// Log-likelihood split into the active-node and inactive-node sums.
struct LogLikParts {
  double positive = 0.0;
  double negative = 0.0;
  double total() const { return positive + negative; }
};

// Log-likelihood of one cascade under the mixture model.
LogLikParts exact_cascade_loglik(const CascadeExposure& cascade, const ItemTopics& gamma,
                                 const ExposurePrior& prior, const EmbeddingTable& emb);

enum class PositiveWeighting {
  kPerPair,        // every (v, u) pair counts with weight 1
  kPriorWeighted,  // pairs of one active u weighted by pi_{i,v}; lower bound of the exact term
};

// Factorized approximation: each (v, u) pair is an independent example.
// Negatives always count once per pair.
LogLikParts approx_cascade_loglik(const CascadeExposure& cascade, const ItemTopics& gamma,
                                  const EmbeddingTable& emb, const ExposurePrior& prior = {},
                                  PositiveWeighting weighting = PositiveWeighting::kPerPair);

// y log Pr + (1 - y) log(1 - Pr) for a single (v, u) pair, Pr clamped.
double pair_loglik(const ItemTopics& gamma, NodeId v, NodeId u, bool label, const EmbeddingTable& emb);

}  // namespace ideoemb
