#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "difflab/errors.hpp"
#include "difflab/graph.hpp"
#include "difflab/rng.hpp"

namespace difflab {

namespace {

DirectedGraph erdos_renyi(std::size_t n, double p_edge, std::uint64_t seed) {
  if (!(p_edge >= 0.0 && p_edge <= 1.0)) {
    throw ValidationError("erdos-renyi edge probability must lie in [0, 1]");
  }
  Rng rng(derive_seed(seed, "erdos-renyi"));
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && rng.uniform() < p_edge) edges.emplace_back(u, v);
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

// Barabasi-Albert growth on an initial (m+1)-clique. Targets are drawn from
// the endpoint list, i.e. proportionally to current undirected degree.
DirectedGraph preferential_attachment(std::size_t n, double density, std::uint64_t seed) {
  if (!(density >= 1.0) || density != std::floor(density)) {
    throw ValidationError("preferential-attachment needs an integer m >= 1");
  }
  const auto m = static_cast<std::size_t>(density);
  if (n < m + 1) {
    throw ValidationError("preferential-attachment needs n >= m + 1 (n=" +
                          std::to_string(n) + ", m=" + std::to_string(m) + ")");
  }
  Rng rng(derive_seed(seed, "preferential-attachment"));
  std::vector<std::pair<NodeId, NodeId>> edges;
  std::vector<NodeId> endpoints;
  auto link = [&](NodeId a, NodeId b) {
    edges.emplace_back(a, b);
    edges.emplace_back(b, a);
    endpoints.push_back(a);
    endpoints.push_back(b);
  };
  for (NodeId a = 0; a <= m; ++a) {
    for (NodeId b = a + 1; b <= m; ++b) link(a, b);
  }
  std::vector<NodeId> picked;
  for (NodeId v = static_cast<NodeId>(m + 1); v < n; ++v) {
    picked.clear();
    while (picked.size() < m) {
      NodeId t = endpoints[rng.below(endpoints.size())];
      bool fresh = true;
      for (NodeId x : picked) fresh = fresh && x != t;
      if (fresh) picked.push_back(t);
    }
    for (NodeId t : picked) link(v, t);
  }
  return DirectedGraph::from_edges(n, edges);
}

}  // namespace

DirectedGraph generate_synthetic(GraphKind kind, std::size_t n, double density,
                                 std::uint64_t seed) {
  if (n < 2) throw ValidationError("synthetic graphs need at least 2 nodes");
  switch (kind) {
    case GraphKind::erdos_renyi:
      return erdos_renyi(n, density, seed);
    case GraphKind::preferential_attachment:
      return preferential_attachment(n, density, seed);
  }
  throw ValidationError("unknown graph kind");
}

}  // namespace difflab
