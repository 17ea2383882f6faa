#pragma once

// Converts oracle instances to library types and enumerates small ones.

#include <algorithm>
#include <numeric>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/graph.hpp"
#include "ideoemb/model.hpp"
#include "ideoemb/random.hpp"
#include "support/oracles.hpp"

namespace ideoemb::testing {

struct LibraryInstance {
  DirectedGraph graph;
  std::vector<Activation> cascade;
  ItemTopics gamma;
  EmbeddingTable emb;
};

// Fills order[] from time[]: by time, ties by node id.
inline void assign_order(oracle::Instance& x) {
  std::vector<int> nodes;
  for (int u = 0; u < static_cast<int>(x.n); ++u)
    if (x.time[u] >= 0) nodes.push_back(u);
  std::stable_sort(nodes.begin(), nodes.end(), [&](int a, int b) { return x.time[a] < x.time[b]; });
  x.order.assign(x.n, -1);
  for (std::size_t j = 0; j < nodes.size(); ++j) x.order[nodes[j]] = static_cast<int>(j);
}

inline LibraryInstance to_library(const oracle::Instance& x) {
  LibraryInstance out;
  std::vector<Edge> edges;
  for (const auto& [a, b] : x.edges) edges.emplace_back(a, b);
  out.graph = build_graph(edges, x.n);
  std::vector<int> nodes;
  for (int u = 0; u < static_cast<int>(x.n); ++u)
    if (x.time[u] >= 0) nodes.push_back(u);
  std::sort(nodes.begin(), nodes.end(), [&](int a, int b) { return x.order[a] < x.order[b]; });
  for (int u : nodes) out.cascade.push_back({x.time[u], 0, static_cast<NodeId>(u)});
  out.gamma = ItemTopics(0, x.gamma);
  std::vector<double> theta, phi;
  for (std::size_t u = 0; u < x.n; ++u)
    for (std::size_t k = 0; k < x.k; ++k) {
      theta.push_back(x.theta[u][k]);
      phi.push_back(x.phi[u][k]);
    }
  out.emb = EmbeddingTable(x.n, x.k, theta, phi);
  return out;
}

// Random parameters in (lo, hi) for an instance skeleton.
inline void randomize_parameters(oracle::Instance& x, Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::vector<double> q(x.k, 1.0);
  x.gamma = x.k == 1 ? std::vector<double>{1.0} : rng.dirichlet(q);
  x.theta.assign(x.n, std::vector<double>(x.k));
  x.phi.assign(x.n, std::vector<double>(x.k));
  for (std::size_t u = 0; u < x.n; ++u)
    for (std::size_t k = 0; k < x.k; ++k) {
      x.theta[u][k] = rng.uniform(lo, hi);
      x.phi[u][k] = rng.uniform(lo, hi);
    }
}

// Calls visit(instance) for every directed graph on n nodes and every
// assignment of each node to {inactive, t = 0, 1, 2}; parameters drawn once
// per graph.
template <typename Visit>
void enumerate_instances(std::size_t n, std::size_t k, Rng& rng, Visit visit) {
  std::vector<std::pair<int, int>> slots;
  for (int a = 0; a < static_cast<int>(n); ++a)
    for (int b = 0; b < static_cast<int>(n); ++b)
      if (a != b) slots.emplace_back(a, b);
  const std::size_t graphs = std::size_t{1} << slots.size();
  std::size_t patterns = 1;
  for (std::size_t j = 0; j < n; ++j) patterns *= 4;

  oracle::Instance x;
  x.n = n;
  x.k = k;
  for (std::size_t mask = 0; mask < graphs; ++mask) {
    x.edges.clear();
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (mask & (std::size_t{1} << s)) x.edges.push_back(slots[s]);
    randomize_parameters(x, rng);
    for (std::size_t pat = 0; pat < patterns; ++pat) {
      x.time.assign(n, -1);
      std::size_t code = pat;
      for (std::size_t u = 0; u < n; ++u, code /= 4) x.time[u] = static_cast<int>(code % 4) - 1;
      assign_order(x);
      visit(x);
    }
  }
}

}  // namespace ideoemb::testing
