#include "ideoemb/graph.hpp"

#include <algorithm>
#include <string>

#include "ideoemb/errors.hpp"
#include "ideoemb/random.hpp"

namespace ideoemb {

DirectedGraph DirectedGraph::from_edges(std::span<const Edge> edges, std::size_t node_count) {
  std::size_t n = node_count;
  for (const auto& [from, to] : edges) {
    if (from == to) throw ValidationError("self-loop on node " + std::to_string(from));
    n = std::max<std::size_t>(n, std::max(from, to) + std::size_t{1});
  }

  DirectedGraph g;
  g.out_.resize(n);
  g.in_.resize(n);
  for (const auto& [from, to] : edges) g.out_[from].push_back(to);
  for (NodeId u = 0; u < n; ++u) {
    auto& succ = g.out_[u];
    std::sort(succ.begin(), succ.end());
    succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
    g.edge_count_ += succ.size();
    for (NodeId v : succ) g.in_[v].push_back(u);
  }
  // in_ lists come out sorted because sources are visited in increasing order.
  return g;
}

std::span<const NodeId> DirectedGraph::out_neighbors(NodeId u) const {
  if (u >= out_.size()) throw std::out_of_range("node " + std::to_string(u) + " out of range");
  return out_[u];
}

std::span<const NodeId> DirectedGraph::in_neighbors(NodeId u) const {
  if (u >= in_.size()) throw std::out_of_range("node " + std::to_string(u) + " out of range");
  return in_[u];
}

bool DirectedGraph::has_edge(NodeId from, NodeId to) const {
  if (from >= out_.size()) return false;
  const auto& succ = out_[from];
  return std::binary_search(succ.begin(), succ.end(), to);
}

double DirectedGraph::density() const {
  const double n = static_cast<double>(node_count());
  if (n < 2) return 0.0;
  return static_cast<double>(edge_count_) / (n * (n - 1.0));
}

std::vector<Edge> DirectedGraph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId u = 0; u < out_.size(); ++u)
    for (NodeId v : out_[u]) out.emplace_back(u, v);
  return out;
}

DirectedGraph build_graph(std::span<const Edge> edges, std::size_t node_count) {
  return DirectedGraph::from_edges(edges, node_count);
}

DirectedGraph complete_graph(std::size_t n) {
  if (n == 0) throw ValidationError("complete_graph: n must be >= 1");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (u != v) edges.emplace_back(u, v);
  return DirectedGraph::from_edges(edges, n);
}

DirectedGraph barabasi_albert_graph(std::size_t n, std::size_t m, std::uint64_t rng_seed) {
  if (m < 1 || m >= n) throw ValidationError("barabasi_albert_graph: requires 1 <= m < n");
  Rng rng(rng_seed);

  std::vector<Edge> edges;
  // Each endpoint appears once per incident edge, so a uniform pick from this
  // list is a degree-proportional pick.
  std::vector<NodeId> endpoints;
  const auto add_undirected = [&](NodeId a, NodeId b) {
    edges.emplace_back(a, b);
    edges.emplace_back(b, a);
    endpoints.push_back(a);
    endpoints.push_back(b);
  };

  for (NodeId leaf = 1; leaf <= m; ++leaf) add_undirected(0, leaf);

  std::vector<NodeId> targets;
  for (auto u = static_cast<NodeId>(m + 1); u < n; ++u) {
    targets.clear();
    while (targets.size() < m) {
      const NodeId cand = endpoints[rng.uniform_index(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end()) targets.push_back(cand);
    }
    for (NodeId t : targets) add_undirected(u, t);
  }
  return DirectedGraph::from_edges(edges, n);
}

}  // namespace ideoemb
