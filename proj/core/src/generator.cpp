#include "ideoemb/generator.hpp"

#include <algorithm>
#include <charconv>
#include <thread>

#include "ideoemb/errors.hpp"

namespace ideoemb {
namespace {

// Stream tags mixed into derive_seed.
constexpr std::uint64_t kGraphStream = 1;
constexpr std::uint64_t kEmbeddingStream = 2;
constexpr std::uint64_t kItemStream = 3;

std::size_t parse_count(const std::string& text, const std::string& whole) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty()) throw ValidationError("bad graph spec: " + whole);
  return v;
}

}  // namespace

GraphSpec GraphSpec::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon - start));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  GraphSpec spec;
  if (parts.size() == 2 && parts[0] == "complete") {
    spec.kind = Kind::kComplete;
    spec.nodes = parse_count(parts[1], text);
  } else if (parts.size() == 3 && (parts[0] == "ba" || parts[0] == "barabasi_albert")) {
    spec.kind = Kind::kBarabasiAlbert;
    spec.nodes = parse_count(parts[1], text);
    spec.attach = parse_count(parts[2], text);
  } else {
    throw ValidationError("bad graph spec '" + text + "' (expected complete:N or ba:N:M)");
  }
  if (spec.nodes == 0) throw ValidationError("graph spec needs at least one node: " + text);
  return spec;
}

std::string GraphSpec::to_string() const {
  if (kind == Kind::kComplete) return "complete:" + std::to_string(nodes);
  return "ba:" + std::to_string(nodes) + ":" + std::to_string(attach);
}

DirectedGraph make_graph(const GraphSpec& spec, std::uint64_t rng_seed) {
  if (spec.kind == GraphSpec::Kind::kComplete) return complete_graph(spec.nodes);
  return barabasi_albert_graph(spec.nodes, spec.attach, rng_seed);
}

void GenConfig::validate() const {
  if (topics == 0) throw ValidationError("topics must be >= 1");
  if (!(polarization > 0.0)) throw ValidationError("polarization must be > 0");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ValidationError("alpha and beta must be > 0");
  if (items == 0) throw ValidationError("items must be >= 1");
  if (!q.empty() && q.size() != topics) throw ValidationError("q must have one entry per topic");
  for (double x : q)
    if (!(x > 0.0)) throw ValidationError("q entries must be > 0");
}

std::vector<double> GenConfig::concentration() const {
  if (!q.empty()) return q;
  return std::vector<double>(topics, 1.0 / 8.0);
}

EmbeddingTable draw_embeddings(const GenConfig& cfg, std::size_t node_count, Rng& rng) {
  cfg.validate();
  const std::size_t k = cfg.topics;
  std::vector<double> theta(node_count * k);
  std::vector<double> phi(node_count * k);
  const double shape = 1.0 / cfg.polarization;
  for (std::size_t j = 0; j < node_count * k; ++j) {
    theta[j] = rng.beta(cfg.alpha, cfg.beta);
    phi[j] = rng.beta(shape, shape);
  }
  return EmbeddingTable(node_count, k, std::move(theta), std::move(phi));
}

ItemTopics draw_item_topics(const GenConfig& cfg, ItemId item, Rng& rng) {
  const auto q = cfg.concentration();
  if (q.size() == 1) return ItemTopics(item, {1.0});
  return ItemTopics(item, rng.dirichlet(q));
}

std::vector<Activation> simulate_cascade(const DirectedGraph& g, const ItemTopics& gamma,
                                         const EmbeddingTable& emb, Rng& rng, std::vector<NodeId>* exposers) {
  const std::size_t n = g.node_count();
  if (n == 0) throw PreconditionError("simulate_cascade: empty graph");
  if (emb.node_count() != n || emb.topic_count() != gamma.topic_count())
    throw ShapeError("simulate_cascade: embedding does not match graph or topics");

  std::vector<Activation> out;
  std::vector<char> seen(n, 0);
  if (exposers) exposers->clear();

  const auto seed = static_cast<NodeId>(rng.uniform_index(n));
  seen[seed] = 1;
  out.push_back({0, gamma.item_id(), seed});
  if (exposers) exposers->push_back(seed);

  std::vector<NodeId> frontier{seed};
  std::vector<NodeId> next;
  // Newly active predecessors of each node touched this round.
  std::vector<std::vector<NodeId>> candidates(n);
  std::vector<NodeId> touched;

  for (Timestamp t = 1; !frontier.empty(); ++t) {
    touched.clear();
    for (NodeId v : frontier) {
      for (NodeId u : g.out_neighbors(v)) {
        if (seen[u]) continue;
        if (candidates[u].empty()) touched.push_back(u);
        candidates[u].push_back(v);
      }
    }
    std::sort(touched.begin(), touched.end());
    next.clear();
    for (NodeId u : touched) {
      auto& from = candidates[u];
      const NodeId v = from.size() == 1 ? from.front() : from[rng.uniform_index(from.size())];
      from.clear();
      seen[u] = 1;

      const std::size_t k = rng.categorical(gamma.gamma());
      if (!rng.bernoulli(emb.theta(u)[k])) continue;
      // Equal Bernoulli attitudes; the event has the alignment probability.
      if (!rng.bernoulli(detail::alignment_unchecked(emb.phi(u)[k], emb.phi(v)[k]))) continue;
      out.push_back({t, gamma.item_id(), u});
      if (exposers) exposers->push_back(v);
      next.push_back(u);
    }
    frontier.swap(next);
  }
  return out;
}

namespace {

void simulate_items(const GenConfig& cfg, Dataset& ds, unsigned threads) {
  ds.items.resize(cfg.items);
  std::vector<std::vector<Activation>> cascades(cfg.items);
  const auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng(derive_seed(cfg.rng_seed, kItemStream, i));
      ds.items[i] = draw_item_topics(cfg, static_cast<ItemId>(i), rng);
      cascades[i] = simulate_cascade(ds.graph, ds.items[i], ds.truth, rng);
    }
  };

  threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(cfg.items)));
  if (threads == 1) {
    run_range(0, cfg.items);
  } else {
    std::vector<std::jthread> workers;
    const std::size_t chunk = (cfg.items + threads - 1) / threads;
    for (std::size_t begin = 0; begin < cfg.items; begin += chunk)
      workers.emplace_back(run_range, begin, std::min(cfg.items, begin + chunk));
  }

  std::vector<Activation> all;
  for (std::size_t i = 0; i < cfg.items; ++i) {
    if (cascades[i].size() == 1) ds.singleton_items.push_back(static_cast<ItemId>(i));
    all.insert(all.end(), cascades[i].begin(), cascades[i].end());
  }
  ds.log = ActivationLog(std::move(all), cfg.items);
}

}  // namespace

Dataset generate_dataset(const GenConfig& cfg, unsigned threads) {
  cfg.validate();
  Dataset ds;
  ds.graph = make_graph(cfg.graph, derive_seed(cfg.rng_seed, kGraphStream));
  Rng rng(derive_seed(cfg.rng_seed, kEmbeddingStream));
  ds.truth = draw_embeddings(cfg, ds.graph.node_count(), rng);
  simulate_items(cfg, ds, threads);
  return ds;
}

Dataset generate_dataset(const GenConfig& cfg, EmbeddingTable truth, unsigned threads) {
  cfg.validate();
  Dataset ds;
  ds.graph = make_graph(cfg.graph, derive_seed(cfg.rng_seed, kGraphStream));
  if (truth.node_count() != ds.graph.node_count() || truth.topic_count() != cfg.topics)
    throw ShapeError("ground-truth table must be |V| x K");
  ds.truth = std::move(truth);
  simulate_items(cfg, ds, threads);
  return ds;
}

}  // namespace ideoemb
