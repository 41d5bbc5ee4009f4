#pragma once

#include <string>
#include <vector>

#include "difflab/graph.hpp"
#include "difflab/influence.hpp"

namespace difflab {

enum class CentralityMetric { outdegree, closeness, betweenness, pagerank };

std::string to_string(CentralityMetric m);
CentralityMetric parse_centrality_metric(const std::string& s);

struct CentralityOptions {
  double pagerank_epsilon = 0.15;
  double pagerank_tolerance = 1e-10;
  int pagerank_max_iterations = 100000;
  /// Betweenness as Σ σ_st(v)/σ_st instead of the raw shortest-path count.
  bool betweenness_fraction = false;
};

/// |F(v)|.
std::vector<double> outdegree_scores(const DirectedGraph& g);
/// 1 / mean BFS distance to the other nodes; unreachable nodes count as |V|.
std::vector<double> closeness_scores(const DirectedGraph& g);
/// Shortest paths between ordered pairs (s, t), s != v != t, passing
/// through v: raw count by default, pair-normalised fraction on request.
std::vector<double> betweenness_scores(const DirectedGraph& g, bool fraction = false);
/// Power iteration with uniform jump probability epsilon; dangling mass is
/// spread uniformly. Stops at L1 residual <= tolerance.
std::vector<double> pagerank_scores(const DirectedGraph& g, double epsilon = 0.15,
                                    double tolerance = 1e-10, int max_iterations = 100000);

/// Throws DomainError on an empty graph or epsilon outside (0, 1).
RankedList centrality(const DirectedGraph& g, CentralityMetric metric,
                      const CentralityOptions& options = {});

}  // namespace difflab
