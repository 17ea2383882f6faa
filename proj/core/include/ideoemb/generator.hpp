#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/graph.hpp"
#include "ideoemb/model.hpp"
#include "ideoemb/random.hpp"

namespace ideoemb {

struct GraphSpec {
  enum class Kind { kComplete, kBarabasiAlbert };
  Kind kind = Kind::kComplete;
  std::size_t nodes = 100;
  std::size_t attach = 10;  // m, Barabasi-Albert only

  // "complete:N" or "ba:N:M".
  static GraphSpec parse(const std::string& text);
  std::string to_string() const;
};

DirectedGraph make_graph(const GraphSpec& spec, std::uint64_t rng_seed);

struct GenConfig {
  std::size_t topics = 4;
  double polarization = 4.0;   // phi ~ Beta(1/p, 1/p)
  double alpha = 0.9;          // theta ~ Beta(alpha, beta)
  double beta = 0.1;
  std::vector<double> q;       // Dirichlet concentration; empty means 1/8 on every topic
  std::size_t items = 1000;
  GraphSpec graph;
  std::uint64_t rng_seed = 1;

  // Throws ValidationError on a non-positive hyper-parameter or zero items.
  void validate() const;
  std::vector<double> concentration() const;
};

// theta ~ Beta(alpha, beta), phi ~ Beta(1/p, 1/p), i.i.d. per node and topic.
EmbeddingTable draw_embeddings(const GenConfig& cfg, std::size_t node_count, Rng& rng);

ItemTopics draw_item_topics(const GenConfig& cfg, ItemId item, Rng& rng);

// One item's cascade. A uniformly drawn seed is active at t = 0. In round t,
// every node that has not yet seen the item and follows at least one node
// activated in round t - 1 is exposed once, by one of those nodes picked
// uniformly. The exposure succeeds when u is interested in a topic k ~ gamma
// (probability theta_u[k]) and u and the exposer draw the same attitude on k.
//
// `exposers`, when given, receives for each returned activation the node that
// exposed it (the seed maps to itself).
std::vector<Activation> simulate_cascade(const DirectedGraph& g, const ItemTopics& gamma,
                                         const EmbeddingTable& emb, Rng& rng,
                                         std::vector<NodeId>* exposers = nullptr);

struct Dataset {
  DirectedGraph graph;
  EmbeddingTable truth;
  std::vector<ItemTopics> items;
  ActivationLog log;
  // Items whose seed never propagated; kept in the log, they yield no
  // training pairs.
  std::vector<ItemId> singleton_items;
};

// Items are simulated with independent streams seeded from (rng_seed, item),
// so the result does not depend on `threads`.
Dataset generate_dataset(const GenConfig& cfg, unsigned threads = 1);

// Same graph and item streams, but cascades run on the given ground truth.
Dataset generate_dataset(const GenConfig& cfg, EmbeddingTable truth, unsigned threads = 1);

}  // namespace ideoemb
