#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ideoemb {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;

// Follower graph. An edge (u, v) means v follows u, so content flows u -> v.
// Immutable once built; adjacency lists are sorted by node id.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  // Deduplicates edges. Throws ValidationError on a self-loop. The node
  // count is max(node_count, largest id + 1).
  static DirectedGraph from_edges(std::span<const Edge> edges, std::size_t node_count = 0);

  std::size_t node_count() const { return out_.size(); }
  std::size_t edge_count() const { return edge_count_; }

  // Followers of u (nodes u can expose).
  std::span<const NodeId> out_neighbors(NodeId u) const;
  // Nodes u follows (nodes that can expose u).
  std::span<const NodeId> in_neighbors(NodeId u) const;

  bool has_edge(NodeId from, NodeId to) const;

  // |E| / (n (n - 1)); zero for n < 2.
  double density() const;

  std::vector<Edge> edges() const;

 private:
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::size_t edge_count_ = 0;
};

DirectedGraph build_graph(std::span<const Edge> edges, std::size_t node_count = 0);

// Every ordered pair (u, v), u != v.
DirectedGraph complete_graph(std::size_t n);

// Preferential attachment grown from a star on m + 1 nodes; each later node
// attaches to m distinct existing nodes with probability proportional to
// degree. m (n - m) undirected edges, each stored in both directions.
DirectedGraph barabasi_albert_graph(std::size_t n, std::size_t m, std::uint64_t rng_seed);

}  // namespace ideoemb
