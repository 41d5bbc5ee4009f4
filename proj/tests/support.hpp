#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"
#include "difflab/rng.hpp"
#include "difflab/simulate.hpp"

namespace difflab::fixtures {

inline DirectedGraph graph_of(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges) {
  return DirectedGraph::from_edges(n, edges);
}

/// Random digraph on n nodes, each ordered pair present with probability d.
inline DirectedGraph random_graph(Rng& rng, std::size_t n, double d) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (u != v && rng.bernoulli(d)) edges.emplace_back(u, v);
    }
  }
  return DirectedGraph::from_edges(n, edges);
}

inline double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Per-link rates are per edge under link delay and per node otherwise.
inline std::size_t rate_count(const DirectedGraph& g, DelayModel d) {
  return d == DelayModel::link ? g.edge_count() : g.node_count();
}

inline AsicParams random_asic(Rng& rng, const DirectedGraph& g, ParamMode mode,
                              DelayModel d = DelayModel::link) {
  if (mode == ParamMode::shared) {
    return AsicParams::shared(uniform_in(rng, 0.05, 0.95), uniform_in(rng, 0.2, 3.0));
  }
  std::vector<double> p(g.edge_count()), r(rate_count(g, d));
  for (auto& x : p) x = uniform_in(rng, 0.05, 0.95);
  for (auto& x : r) x = uniform_in(rng, 0.2, 3.0);
  return AsicParams::per_link(std::move(p), std::move(r));
}

/// Per-link weights leave a random share of slack at every node.
inline AsltParams random_aslt(Rng& rng, const DirectedGraph& g, ParamMode mode,
                              DelayModel d = DelayModel::link) {
  if (mode == ParamMode::shared) {
    return AsltParams::shared(uniform_in(rng, 0.1, 0.95), uniform_in(rng, 0.2, 3.0));
  }
  std::vector<double> q(g.edge_count()), r(rate_count(g, d));
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto in = g.in_edges(v);
    if (in.empty()) continue;
    const double budget = uniform_in(rng, 0.3, 0.95);
    std::vector<double> w(in.size());
    double total = 0.0;
    for (auto& x : w) total += (x = uniform_in(rng, 0.1, 1.0));
    for (std::size_t i = 0; i < in.size(); ++i) q[in[i]] = budget * w[i] / total;
  }
  for (auto& x : r) x = uniform_in(rng, 0.2, 3.0);
  return AsltParams::per_link(std::move(q), std::move(r));
}

/// Cascade from a random seed node simulated under the given parameters,
/// observed up to a random horizon past its last activation.
inline Cascade random_cascade(Rng& rng, const DirectedGraph& g, const ModelParams& params,
                              DelayModel d = DelayModel::link) {
  CascadeSimulator sim(g, params, d);
  const NodeId seed = static_cast<NodeId>(rng.below(g.node_count()));
  Cascade c = sim.run({&seed, 1}, rng.next());
  return Cascade(c.events(), c.final_time() + uniform_in(rng, 0.0, 3.0));
}

}  // namespace difflab::fixtures
