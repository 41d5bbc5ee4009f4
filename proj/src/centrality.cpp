#include "difflab/centrality.hpp"

#include <cmath>

#include "difflab/errors.hpp"
#include "difflab/kernels.hpp"

namespace difflab {

std::string to_string(CentralityMetric m) {
  switch (m) {
    case CentralityMetric::outdegree:
      return "outdegree";
    case CentralityMetric::closeness:
      return "closeness";
    case CentralityMetric::betweenness:
      return "betweenness";
    case CentralityMetric::pagerank:
      return "pagerank";
  }
  return "outdegree";
}

CentralityMetric parse_centrality_metric(const std::string& s) {
  if (s == "outdegree") return CentralityMetric::outdegree;
  if (s == "closeness") return CentralityMetric::closeness;
  if (s == "betweenness") return CentralityMetric::betweenness;
  if (s == "pagerank") return CentralityMetric::pagerank;
  throw ValidationError("unknown centrality metric '" + s + "'");
}

std::vector<double> outdegree_scores(const DirectedGraph& g) {
  std::vector<double> out(g.node_count());
  for (NodeId v = 0; v < out.size(); ++v) out[v] = static_cast<double>(g.out_degree(v));
  return out;
}

std::vector<double> closeness_scores(const DirectedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  std::vector<std::uint32_t> dist(n);
  std::vector<NodeId> queue(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), UINT32_MAX);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    double total = 0.0;
    while (head < tail) {
      const NodeId u = queue[head++];
      total += dist[u];
      for (NodeId w : g.children(u)) {
        if (dist[w] == UINT32_MAX) {
          dist[w] = dist[u] + 1;
          queue[tail++] = w;
        }
      }
    }
    total += static_cast<double>(n - tail) * static_cast<double>(n);
    out[s] = static_cast<double>(n - 1) / total;
  }
  return out;
}

std::vector<double> betweenness_scores(const DirectedGraph& g, bool fraction) {
  const std::size_t n = g.node_count();
  std::vector<double> bc(n, 0.0);
  std::vector<std::int64_t> dist(n);
  std::vector<double> sigma(n);
  std::vector<double> acc(n);
  std::vector<NodeId> order(n);
  for (NodeId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    dist[s] = 0;
    sigma[s] = 1.0;
    std::size_t head = 0, tail = 0;
    order[tail++] = s;
    while (head < tail) {
      const NodeId u = order[head++];
      for (NodeId w : g.children(u)) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          order[tail++] = w;
        }
        if (dist[w] == dist[u] + 1) sigma[w] += sigma[u];
      }
    }
    // Reverse BFS order: successors on the shortest-path DAG are final first.
    // Raw: acc(v) = Σ_succ (1 + acc(w)) shortest v→t continuations.
    // Fraction: acc(v) = Σ_succ σ_v/σ_w (1 + acc(w)).
    for (std::size_t i = tail; i-- > 0;) {
      const NodeId v = order[i];
      double a = 0.0;
      for (NodeId w : g.children(v)) {
        if (dist[w] != dist[v] + 1) continue;
        a += fraction ? sigma[v] / sigma[w] * (1.0 + acc[w]) : 1.0 + acc[w];
      }
      acc[v] = a;
      if (v != s) bc[v] += fraction ? a : sigma[v] * a;
    }
  }
  return bc;
}

std::vector<double> pagerank_scores(const DirectedGraph& g, double epsilon, double tolerance,
                                     int max_iterations) {
  const std::size_t n = g.node_count();
  if (n == 0) throw DomainError("pagerank of an empty graph");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("pagerank epsilon must lie in (0, 1)");
  const auto& k = kernels::active();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> pr(n, inv_n), next(n), contrib(n), inv_out(n);
  for (NodeId v = 0; v < n; ++v) {
    inv_out[v] = g.out_degree(v) ? 1.0 / static_cast<double>(g.out_degree(v)) : 0.0;
  }
  for (int it = 0; it < max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId v = 0; v < n; ++v) {
      if (!g.out_degree(v)) dangling += pr[v];
    }
    k.multiply(n, pr.data(), inv_out.data(), contrib.data());
    for (NodeId v = 0; v < n; ++v) {
      double s = 0.0;
      for (NodeId u : g.parents(v)) s += contrib[u];
      next[v] = s;
    }
    k.affine(n, 1.0 - epsilon, epsilon * inv_n + (1.0 - epsilon) * dangling * inv_n, next.data());
    const double residual = k.l1_distance(n, next.data(), pr.data());
    pr.swap(next);
    if (residual <= tolerance) break;
  }
  return pr;
}

RankedList centrality(const DirectedGraph& g, CentralityMetric metric,
                      const CentralityOptions& options) {
  if (g.node_count() == 0) throw DomainError("centrality of an empty graph");
  switch (metric) {
    case CentralityMetric::outdegree:
      return RankedList::from_scores(outdegree_scores(g));
    case CentralityMetric::closeness:
      return RankedList::from_scores(closeness_scores(g));
    case CentralityMetric::betweenness:
      return RankedList::from_scores(betweenness_scores(g, options.betweenness_fraction));
    case CentralityMetric::pagerank:
      return RankedList::from_scores(pagerank_scores(g, options.pagerank_epsilon,
                                                     options.pagerank_tolerance,
                                                     options.pagerank_max_iterations));
  }
  throw DomainError("unknown centrality metric");
}

}  // namespace difflab
