#pragma once

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"
#include "oracle.hpp"

namespace difflab::oracle {

/// Raw edge list and parameter arrays. Shared AsLT weights are expanded as
/// q / in-degree counted from the edge list itself.
inline Problem problem_of(const DirectedGraph& g, const ModelParams& params, DelayModel delay) {
  Problem pb;
  pb.n = g.node_count();
  pb.delay = static_cast<Delay>(static_cast<int>(delay));
  for (EdgeId e = 0; e < g.edge_count(); ++e) pb.edges.emplace_back(g.edge_source(e), g.edge_target(e));
  const std::size_t rates = delay == DelayModel::link ? g.edge_count() : g.node_count();
  if (const auto* a = std::get_if<AsicParams>(&params)) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) pb.coef.push_back(a->p[e]);
    for (std::size_t i = 0; i < rates; ++i) pb.rate.push_back(a->r[i]);
    return pb;
  }
  const auto& l = std::get<AsltParams>(params);
  std::vector<double> indeg(pb.n, 0.0);
  for (auto [u, v] : pb.edges) indeg[v] += 1.0;
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    pb.coef.push_back(l.mode == ParamMode::shared ? l.q[0] / indeg[pb.edges[e].second] : l.q[e]);
  }
  for (std::size_t i = 0; i < rates; ++i) pb.rate.push_back(l.r[i]);
  return pb;
}

inline std::vector<Observation> observations_of(const CascadeSet& data) {
  std::vector<Observation> out;
  for (const auto& c : data) {
    Observation ob;
    for (const auto& a : c.events()) ob.events.emplace_back(a.node, a.time);
    ob.horizon = c.horizon();
    out.push_back(std::move(ob));
  }
  return out;
}

}  // namespace difflab::oracle
