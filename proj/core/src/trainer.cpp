#include "ideoemb/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ideoemb/errors.hpp"

namespace ideoemb {
namespace {

constexpr std::uint64_t kInitStream = 11;
constexpr std::uint64_t kEpochStream = 12;
constexpr std::uint64_t kSelectStream = 13;

const ItemTopics& item_of(std::span<const ItemTopics> items, ItemId item) {
  if (item >= items.size()) throw ValidationError("example refers to unknown item " + std::to_string(item));
  return items[item];
}

double example_loglik_unchecked(const TrainExample& x, std::span<const double> gamma, const EmbeddingTable& emb) {
  const double p = clamp_probability(
      detail::pair_prob_unchecked(gamma, emb.theta(x.u).data(), emb.phi(x.u).data(), emb.phi(x.v).data()));
  return x.y ? std::log(p) : std::log1p(-p);
}

bool has_positive_pair(const DirectedGraph& g, const ActivationLog& log, std::span<const ItemId> item_ids) {
  std::vector<Timestamp> time(g.node_count(), -1);
  bool found = false;
  for (ItemId item : item_ids) {
    const auto cascade = log.cascade(item);
    for (const auto& a : cascade) time[a.node] = a.t;
    for (const auto& a : cascade) {
      for (NodeId u : g.out_neighbors(a.node))
        if (time[u] > a.t) found = true;
      if (found) break;
    }
    for (const auto& a : cascade) time[a.node] = -1;
    if (found) return true;
  }
  return false;
}

}  // namespace

AdaGradAscent::AdaGradAscent(std::size_t node_count, std::size_t topic_count, double clamp_eps, double epsilon)
    : topics_(topic_count),
      lo_(clamp_eps),
      hi_(1.0 - clamp_eps),
      epsilon_(epsilon),
      theta_accum_(node_count * topic_count, 0.0),
      phi_accum_(node_count * topic_count, 0.0),
      g_theta_(topic_count),
      g_phi_u_(topic_count),
      g_phi_v_(topic_count) {}

double AdaGradAscent::update(const TrainExample& x, std::span<const double> gamma, EmbeddingTable& emb, double lr) {
  double* theta_u = emb.theta(x.u).data();
  double* phi_u = emb.phi(x.u).data();
  double* phi_v = emb.phi(x.v).data();

  const double p = clamp_probability(detail::pair_prob_unchecked(gamma, theta_u, phi_u, phi_v));
  const double dlog = x.y ? 1.0 / p : -1.0 / (1.0 - p);
  for (std::size_t k = 0; k < topics_; ++k) {
    const double w = dlog * gamma[k];
    g_theta_[k] = w * detail::alignment_unchecked(phi_u[k], phi_v[k]);
    g_phi_u_[k] = w * theta_u[k] * (2.0 * phi_v[k] - 1.0);
    g_phi_v_[k] = w * theta_u[k] * (2.0 * phi_u[k] - 1.0);
  }
  const auto step = [&](double& accum, double grad) {
    accum += grad * grad;
    return lr * grad / (std::sqrt(accum) + epsilon_);
  };
  for (std::size_t k = 0; k < topics_; ++k) {
    if (gamma[k] == 0.0) continue;
    const std::size_t su = x.u * topics_ + k;
    const std::size_t sv = x.v * topics_ + k;
    theta_u[k] = std::clamp(theta_u[k] + step(theta_accum_[su], g_theta_[k]), lo_, hi_);
    phi_u[k] = std::clamp(phi_u[k] + step(phi_accum_[su], g_phi_u_[k]), lo_, hi_);
    phi_v[k] = std::clamp(phi_v[k] + step(phi_accum_[sv], g_phi_v_[k]), lo_, hi_);
  }
  return x.y ? std::log(p) : std::log1p(-p);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(lr_init > 0.0) || !(lr_floor > 0.0)) throw ValidationError("learning rates must be > 0");
  if (lr_floor > lr_init) throw ValidationError("lr_floor must not exceed lr_init");
  if (!(negative_ratio > 0.0)) throw ValidationError("negative_ratio must be > 0");
  if (seed_sample_size < 1) throw ValidationError("seed_sample_size must be >= 1");
  if (!(clamp_eps >= 0.0 && clamp_eps < 0.5)) throw ValidationError("clamp_eps must lie in [0, 0.5)");
  if (restarts < 1) throw ValidationError("restarts must be >= 1");
}

double TrainConfig::learning_rate(std::size_t epoch) const {
  if (epochs <= 1) return lr_init;
  const double frac = static_cast<double>(std::min(epoch, epochs - 1)) / static_cast<double>(epochs - 1);
  return lr_init + (lr_floor - lr_init) * frac;
}

void append_cascade_examples(const DirectedGraph& g, std::span<const Activation> cascade,
                             std::size_t seed_sample_size, double negative_ratio, Rng& rng,
                             std::vector<TrainExample>& out) {
  if (cascade.size() < 2) return;
  const ItemId item = cascade.front().item;
  const std::size_t n = g.node_count();

  // Activation time per node, -1 when inactive. Allocated per call so the
  // function stays reentrant; cascades are small next to the cost of the
  // examples they produce.
  std::vector<Timestamp> time(n, -1);
  for (const auto& a : cascade) {
    if (a.node >= n) throw std::out_of_range("activation of node " + std::to_string(a.node) + " outside graph");
    time[a.node] = a.t;
  }

  const auto sample_size = static_cast<std::uint32_t>(std::min(seed_sample_size, cascade.size()));
  auto picked = rng.sample_without_replacement(static_cast<std::uint32_t>(cascade.size()), sample_size);
  std::sort(picked.begin(), picked.end());

  std::vector<NodeId> inactive;
  for (std::uint32_t idx : picked) {
    const NodeId v = cascade[idx].node;
    const Timestamp tv = cascade[idx].t;
    inactive.clear();
    std::size_t positives = 0;
    for (NodeId u : g.out_neighbors(v)) {
      if (time[u] < 0) {
        inactive.push_back(u);
      } else if (time[u] > tv) {
        out.push_back({item, v, u, true});
        ++positives;
      }
    }
    if (positives == 0 || inactive.empty()) continue;
    const double wanted = std::round(negative_ratio * static_cast<double>(positives));
    const auto count = static_cast<std::uint32_t>(std::min<double>(wanted, static_cast<double>(inactive.size())));
    for (std::uint32_t j : rng.sample_without_replacement(static_cast<std::uint32_t>(inactive.size()), count))
      out.push_back({item, v, inactive[j], false});
  }
}

std::vector<TrainExample> build_examples(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> item_ids, const TrainConfig& cfg, Rng& rng) {
  std::vector<TrainExample> out;
  for (ItemId item : item_ids)
    append_cascade_examples(g, log.cascade(item), cfg.seed_sample_size, cfg.negative_ratio, rng, out);
  return out;
}

std::vector<TrainExample> build_examples(const DirectedGraph& g, const ActivationLog& log, const TrainConfig& cfg,
                                         Rng& rng) {
  std::vector<ItemId> ids(log.item_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ItemId>(i);
  return build_examples(g, log, ids, cfg, rng);
}

std::vector<TrainExample> selection_examples(const DirectedGraph& g, const ActivationLog& log,
                                             std::span<const ItemId> item_ids, const TrainConfig& cfg) {
  Rng rng(derive_seed(cfg.rng_seed, kSelectStream));
  return build_examples(g, log, item_ids, cfg, rng);
}

std::vector<TrainExample> epoch_examples(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> item_ids, const TrainConfig& cfg,
                                         std::size_t restart, std::size_t epoch) {
  Rng rng(derive_seed(cfg.rng_seed, kEpochStream, restart, epoch));
  return build_examples(g, log, item_ids, cfg, rng);
}

double example_prob(const TrainExample& x, std::span<const ItemTopics> items, const EmbeddingTable& emb) {
  return clamp_probability(pair_activation_prob(item_of(items, x.item), x.u, x.v, emb));
}

ExampleGradient example_gradient(const TrainExample& x, std::span<const ItemTopics> items,
                                 const EmbeddingTable& emb) {
  const ItemTopics& gamma = item_of(items, x.item);
  const std::size_t k_count = gamma.topic_count();
  if (emb.topic_count() != k_count) throw ShapeError("embedding K differs from item K");
  const auto theta_u = emb.theta(x.u);
  const auto phi_u = emb.phi(x.u);
  const auto phi_v = emb.phi(x.v);

  const double p = clamp_probability(pair_activation_prob(gamma, x.u, x.v, emb));
  const double dlog = x.y ? 1.0 / p : -1.0 / (1.0 - p);

  ExampleGradient grad;
  grad.u = x.u;
  grad.v = x.v;
  grad.loglik = x.y ? std::log(p) : std::log1p(-p);
  grad.theta_u.resize(k_count);
  grad.phi_u.resize(k_count);
  grad.phi_v.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const double w = dlog * gamma[k];
    grad.theta_u[k] = w * detail::alignment_unchecked(phi_u[k], phi_v[k]);
    grad.phi_u[k] = w * theta_u[k] * (2.0 * phi_v[k] - 1.0);
    grad.phi_v[k] = w * theta_u[k] * (2.0 * phi_u[k] - 1.0);
  }
  return grad;
}

double examples_loglik(std::span<const TrainExample> examples, std::span<const ItemTopics> items,
                       const EmbeddingTable& emb) {
  double total = 0.0;
  for (const auto& x : examples) total += example_loglik_unchecked(x, item_of(items, x.item).gamma(), emb);
  return total;
}

FitResult fit(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
              std::span<const ItemId> train_items, const TrainConfig& cfg) {
  cfg.validate();
  if (items.empty()) throw ValidationError("fit: no items");
  const std::size_t k_count = items.front().topic_count();
  for (const auto& it : items)
    if (it.topic_count() != k_count) throw ShapeError("fit: items disagree on the topic count");
  if (log.item_count() > items.size()) throw ValidationError("fit: activation log refers to unknown items");
  for (ItemId i : train_items)
    if (i >= items.size()) throw ValidationError("fit: unknown training item " + std::to_string(i));
  if (!has_positive_pair(g, log, train_items)) throw NoTrainingDataError();

  const std::size_t n = g.node_count();

  const auto selection = selection_examples(g, log, train_items, cfg);
  const auto selection_mean = [&](const EmbeddingTable& emb) {
    return selection.empty() ? 0.0 : examples_loglik(selection, items, emb) / static_cast<double>(selection.size());
  };

  FitResult result;
  double best = -INFINITY;
  std::vector<TrainExample> examples;
  for (std::size_t restart = 0; restart < cfg.restarts; ++restart) {
    Rng init_rng(derive_seed(cfg.rng_seed, kInitStream, restart));
    std::vector<double> theta(n * k_count);
    std::vector<double> phi(n * k_count);
    for (double& x : theta) x = init_rng.uniform(0.4, 0.6);
    for (double& x : phi) x = init_rng.uniform(0.4, 0.6);
    EmbeddingTable emb(n, k_count, std::move(theta), std::move(phi));
    AdaGradAscent opt(n, k_count, cfg.clamp_eps);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
      const double lr = cfg.learning_rate(epoch);
      examples = epoch_examples(g, log, train_items, cfg, restart, epoch);
      for (const auto& x : examples) opt.update(x, items[x.item].gamma(), emb, lr);

      EpochTrace tr;
      tr.restart = restart;
      tr.epoch = epoch;
      tr.learning_rate = lr;
      tr.examples = examples.size();
      tr.mean_loglik = selection_mean(emb);
      result.trace.push_back(tr);
    }

    const double objective = selection_mean(emb);
    result.restart_objectives.push_back(objective);
    if (restart == 0 || objective > best) {
      best = objective;
      result.best_restart = restart;
      result.embeddings = std::move(emb);
    }
  }
  return result;
}

FitResult fit(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
              const TrainConfig& cfg) {
  std::vector<ItemId> ids(log.item_count());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<ItemId>(i);
  return fit(g, items, log, ids, cfg);
}

}  // namespace ideoemb
