#include "ideoemb/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ideoemb/errors.hpp"

namespace ideoemb {
namespace {

void check_unit(double x, const char* what) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + " outside [0,1]: " + std::to_string(x));
}

void check_unit(std::span<const double> xs, const char* what) {
  for (double x : xs) check_unit(x, what);
}

}  // namespace

double clamp_probability(double p) { return std::clamp(p, kProbFloor, 1.0 - kProbFloor); }

ItemTopics::ItemTopics(ItemId item_id, std::vector<double> gamma) : item_id_(item_id), gamma_(std::move(gamma)) {
  if (gamma_.empty()) throw ShapeError("item topics need K >= 1");
  double sum = 0.0;
  for (double g : gamma_) {
    if (!(g >= 0.0)) throw DomainError("negative topic weight on item " + std::to_string(item_id_));
    sum += g;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("topic weights of item " + std::to_string(item_id_) + " sum to " + std::to_string(sum));
}

EmbeddingTable::EmbeddingTable(std::size_t node_count, std::size_t topic_count, double fill)
    : nodes_(node_count),
      topics_(topic_count),
      theta_(node_count * topic_count, fill),
      phi_(node_count * topic_count, fill) {
  check_unit(fill, "embedding fill");
}

EmbeddingTable::EmbeddingTable(std::size_t node_count, std::size_t topic_count, std::vector<double> theta,
                               std::vector<double> phi)
    : nodes_(node_count), topics_(topic_count), theta_(std::move(theta)), phi_(std::move(phi)) {
  if (theta_.size() != nodes_ * topics_ || phi_.size() != nodes_ * topics_)
    throw ShapeError("embedding tables must be node_count x topic_count");
  check_unit(theta_, "theta");
  check_unit(phi_, "phi");
}

void EmbeddingTable::flip_polarity(std::size_t k) {
  if (k >= topics_) throw ShapeError("topic index out of range");
  for (std::size_t u = 0; u < nodes_; ++u) phi_[u * topics_ + k] = 1.0 - phi_[u * topics_ + k];
}

ExposurePrior ExposurePrior::first_activator() {
  ExposurePrior p;
  p.kind_ = Kind::kFirstActivator;
  return p;
}

ExposurePrior ExposurePrior::custom(std::vector<double> node_weights) {
  for (double w : node_weights)
    if (!(w >= 0.0) || !std::isfinite(w)) throw ValidationError("exposure weights must be finite and >= 0");
  ExposurePrior p;
  p.kind_ = Kind::kCustomWeights;
  p.node_weights_ = std::move(node_weights);
  return p;
}

std::vector<double> ExposurePrior::weights(std::span<const NodeId> activators) const {
  if (activators.empty()) throw PreconditionError("exposure prior over an empty activator set");
  std::vector<double> w(activators.size(), 0.0);
  switch (kind_) {
    case Kind::kUniform:
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(activators.size()));
      break;
    case Kind::kFirstActivator:
      w.front() = 1.0;
      break;
    case Kind::kCustomWeights: {
      double total = 0.0;
      for (std::size_t j = 0; j < activators.size(); ++j) {
        if (activators[j] >= node_weights_.size())
          throw ValidationError("no exposure weight for node " + std::to_string(activators[j]));
        w[j] = node_weights_[activators[j]];
        total += w[j];
      }
      if (!(total > 0.0)) throw ValidationError("exposure weights vanish on an activator set");
      for (double& x : w) x /= total;
      break;
    }
  }
  return w;
}

double alignment_prob(double phi_u, double phi_v) {
  check_unit(phi_u, "phi_u");
  check_unit(phi_v, "phi_v");
  return detail::alignment_unchecked(phi_u, phi_v);
}

double pair_activation_prob(const ItemTopics& gamma, std::span<const double> theta_u,
                            std::span<const double> phi_u, std::span<const double> phi_v) {
  const std::size_t k = gamma.topic_count();
  if (theta_u.size() != k || phi_u.size() != k || phi_v.size() != k)
    throw ShapeError("pair_activation_prob: vectors must have length K = " + std::to_string(k));
  check_unit(theta_u, "theta_u");
  check_unit(phi_u, "phi_u");
  check_unit(phi_v, "phi_v");
  return detail::pair_prob_unchecked(gamma.gamma(), theta_u.data(), phi_u.data(), phi_v.data());
}

double pair_activation_prob(const ItemTopics& gamma, NodeId u, NodeId v, const EmbeddingTable& emb) {
  if (u >= emb.node_count() || v >= emb.node_count()) throw std::out_of_range("node outside embedding table");
  if (emb.topic_count() != gamma.topic_count()) throw ShapeError("embedding K differs from item K");
  return detail::pair_prob_unchecked(gamma.gamma(), emb.theta(u).data(), emb.phi(u).data(), emb.phi(v).data());
}

double mixture_activation_prob(const ItemTopics& gamma, NodeId u, std::span<const NodeId> activators,
                               const ExposurePrior& prior, const EmbeddingTable& emb) {
  const auto w = prior.weights(activators);
  double p = 0.0;
  for (std::size_t j = 0; j < activators.size(); ++j)
    p += w[j] * pair_activation_prob(gamma, u, activators[j], emb);
  return p;
}

CascadeExposure build_exposure(const DirectedGraph& g, std::span<const Activation> cascade) {
  CascadeExposure out;
  if (cascade.empty()) return out;
  out.item = cascade.front().item;

  const std::size_t n = g.node_count();
  constexpr std::size_t kInactive = static_cast<std::size_t>(-1);
  // Position in the cascade; positions respect time order, so comparing
  // timestamps decides "strictly earlier" and positions break ties.
  std::vector<std::size_t> position(n, kInactive);
  out.active.reserve(cascade.size());
  for (std::size_t j = 0; j < cascade.size(); ++j) {
    const NodeId u = cascade[j].node;
    if (u >= n) throw std::out_of_range("activation of node " + std::to_string(u) + " outside graph");
    position[u] = j;
    out.active.push_back(u);
  }

  for (NodeId u = 0; u < n; ++u) {
    CascadeExposure::Exposed e;
    e.node = u;
    e.active = position[u] != kInactive;
    for (NodeId v : g.in_neighbors(u)) {
      if (position[v] == kInactive) continue;
      if (e.active && !(cascade[position[v]].t < cascade[position[u]].t)) continue;
      e.activators.push_back(v);
    }
    if (e.activators.empty()) continue;
    std::sort(e.activators.begin(), e.activators.end(),
              [&](NodeId a, NodeId b) { return position[a] < position[b]; });
    out.exposed.push_back(std::move(e));
  }
  return out;
}

LogLikParts exact_cascade_loglik(const CascadeExposure& cascade, const ItemTopics& gamma,
                                 const ExposurePrior& prior, const EmbeddingTable& emb) {
  LogLikParts ll;
  for (const auto& e : cascade.exposed) {
    const double p = clamp_probability(mixture_activation_prob(gamma, e.node, e.activators, prior, emb));
    if (e.active)
      ll.positive += std::log(p);
    else
      ll.negative += std::log1p(-p);
  }
  return ll;
}

LogLikParts approx_cascade_loglik(const CascadeExposure& cascade, const ItemTopics& gamma,
                                  const EmbeddingTable& emb, const ExposurePrior& prior,
                                  PositiveWeighting weighting) {
  LogLikParts ll;
  for (const auto& e : cascade.exposed) {
    if (!e.active) {
      for (NodeId v : e.activators) ll.negative += pair_loglik(gamma, v, e.node, false, emb);
      continue;
    }
    if (weighting == PositiveWeighting::kPerPair) {
      for (NodeId v : e.activators) ll.positive += pair_loglik(gamma, v, e.node, true, emb);
    } else {
      const auto w = prior.weights(e.activators);
      for (std::size_t j = 0; j < e.activators.size(); ++j)
        ll.positive += w[j] * pair_loglik(gamma, e.activators[j], e.node, true, emb);
    }
  }
  return ll;
}

double pair_loglik(const ItemTopics& gamma, NodeId v, NodeId u, bool label, const EmbeddingTable& emb) {
  const double p = clamp_probability(pair_activation_prob(gamma, u, v, emb));
  return label ? std::log(p) : std::log1p(-p);
}

}  // namespace ideoemb
