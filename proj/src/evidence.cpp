#include "difflab/evidence.hpp"

#include "difflab/errors.hpp"

namespace difflab {

std::optional<std::size_t> Evidence::find_segment(std::size_t cascade, NodeId v) const {
  for (std::size_t s = 0; s < seg_node.size(); ++s) {
    if (seg_cascade[s] == cascade && seg_node[s] == v) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> Evidence::find_frontier(std::size_t cascade, NodeId v) const {
  for (std::size_t s = 0; s < fr_node.size(); ++s) {
    if (fr_cascade[s] == cascade && fr_node[s] == v) return s;
  }
  return std::nullopt;
}

std::optional<std::size_t> Evidence::find_parent_record(std::size_t segment, EdgeId e) const {
  for (std::size_t i = seg_begin[segment]; i < seg_begin[segment + 1]; ++i) {
    if (par_edge[i] == e) return i;
  }
  return std::nullopt;
}

Evidence build_evidence(const DirectedGraph& g, const CascadeSet& data, ModelKind model) {
  Evidence ev;
  ev.model = model;
  ev.node_count = g.node_count();
  ev.edge_count = g.edge_count();

  // Activation times for the current cascade, reset through the touched list.
  std::vector<double> time(g.node_count(), CascadeIndex::kInactive);
  std::vector<std::uint32_t> frontier_mark(g.node_count(), 0);
  std::uint32_t mark = 0;

  for (std::size_t m = 0; m < data.size(); ++m) {
    const Cascade& c = data[m];
    check_cascade_nodes(g, c);
    for (const auto& a : c.events()) time[a.node] = a.time;
    ++mark;

    for (const auto& a : c.events()) {
      const NodeId v = a.node;
      auto ps = g.parents(v);
      auto es = g.in_edges(v);
      const std::size_t before = ev.par_edge.size();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (time[ps[i]] < a.time) {
          ev.par_edge.push_back(es[i]);
          ev.par_dt.push_back(a.time - time[ps[i]]);
        }
      }
      if (ev.par_edge.size() == before) {
        if (a.time != c.initial_time()) {
          throw EstimationError("cascade '" + c.id() + "' (index " + std::to_string(m) +
                                "): node " + std::to_string(v) + " activates at t=" +
                                std::to_string(a.time) +
                                " with no earlier active parent; likelihood is zero");
        }
        ++ev.initial_activations;
      } else {
        ev.seg_begin.push_back(static_cast<std::uint32_t>(ev.par_edge.size()));
        ev.seg_cascade.push_back(static_cast<std::uint32_t>(m));
        ev.seg_node.push_back(v);
      }

      for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) {
        const NodeId w = g.edge_target(e);
        if (time[w] != CascadeIndex::kInactive) continue;
        if (model == ModelKind::asic) {
          ev.fail_edge.push_back(e);
          ev.fail_cascade.push_back(static_cast<std::uint32_t>(m));
          ev.fail_elapsed.push_back(c.horizon() - a.time);
        } else if (frontier_mark[w] != mark) {
          frontier_mark[w] = mark;
          ev.fr_node.push_back(w);
          ev.fr_cascade.push_back(static_cast<std::uint32_t>(m));
        }
      }
    }

    if (model == ModelKind::aslt) {
      const double T = c.horizon();
      for (std::size_t s = ev.fr_tail_begin.size() - 1; s < ev.fr_node.size(); ++s) {
        const NodeId w = ev.fr_node[s];
        auto ps = g.parents(w);
        auto es = g.in_edges(w);
        for (std::size_t i = 0; i < ps.size(); ++i) {
          if (time[ps[i]] != CascadeIndex::kInactive) {
            ev.tail_edge.push_back(es[i]);
            ev.tail_elapsed.push_back(T - time[ps[i]]);
          } else {
            ev.inactive_edge.push_back(es[i]);
          }
        }
        ev.fr_tail_begin.push_back(static_cast<std::uint32_t>(ev.tail_edge.size()));
        ev.fr_inactive_begin.push_back(static_cast<std::uint32_t>(ev.inactive_edge.size()));
      }
    }

    for (const auto& a : c.events()) time[a.node] = CascadeIndex::kInactive;
  }
  return ev;
}

}  // namespace difflab
