#include "difflab/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "difflab/errors.hpp"

namespace difflab {

Cascade::Cascade(std::vector<Activation> events, double horizon, std::string id,
                 std::string topic)
    : events_(std::move(events)), horizon_(horizon), id_(std::move(id)), topic_(std::move(topic)) {
  std::unordered_set<NodeId> seen;
  seen.reserve(events_.size());
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (!std::isfinite(events_[i].time)) {
      throw ValidationError("cascade '" + id_ + "': non-finite activation time");
    }
    if (i > 0 && events_[i].time < events_[i - 1].time) {
      throw ValidationError("cascade '" + id_ + "': activation times must be non-decreasing");
    }
    if (!seen.insert(events_[i].node).second) {
      throw ValidationError("cascade '" + id_ + "': node " + std::to_string(events_[i].node) +
                            " activates twice");
    }
  }
  if (std::isnan(horizon_) || (!events_.empty() && horizon_ < events_.back().time)) {
    throw ValidationError("cascade '" + id_ + "': horizon precedes the last activation");
  }
}

Cascade Cascade::truncated(double cutoff) const {
  auto end = std::lower_bound(events_.begin(), events_.end(), cutoff,
                              [](const Activation& a, double t) { return a.time < t; });
  return Cascade(std::vector<Activation>(events_.begin(), end), cutoff, id_, topic_);
}

CascadeIndex::CascadeIndex(const Cascade& cascade, const DirectedGraph& g)
    : cascade_(&cascade), times_(g.node_count(), kInactive) {
  for (const auto& a : cascade.events()) {
    if (a.node >= g.node_count()) {
      throw ValidationError("cascade '" + cascade.id() + "' references node " +
                            std::to_string(a.node) + " outside the graph");
    }
    times_[a.node] = a.time;
  }
}

void check_cascade_nodes(const DirectedGraph& g, const Cascade& c) {
  for (const auto& a : c.events()) {
    if (a.node >= g.node_count()) {
      throw ValidationError("cascade '" + c.id() + "' references node " +
                            std::to_string(a.node) + " outside the graph");
    }
  }
}

std::vector<NodeId> frontier(const DirectedGraph& g, const CascadeIndex& idx) {
  std::vector<NodeId> out;
  for (const auto& a : idx.cascade().events()) {
    for (NodeId w : g.children(a.node)) {
      if (!idx.active(w)) out.push_back(w);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<NodeId> frontier(const DirectedGraph& g, const Cascade& c) {
  return frontier(g, CascadeIndex(c, g));
}

std::vector<NodeId> effective_parents(const DirectedGraph& g, const CascadeIndex& idx, NodeId v) {
  if (v >= g.node_count()) throw DomainError("node outside the graph");
  std::vector<NodeId> out;
  if (idx.active(v)) {
    const double tv = idx.time(v);
    for (NodeId u : g.parents(v)) {
      if (idx.time(u) < tv) out.push_back(u);
    }
    return out;
  }
  for (NodeId u : g.parents(v)) {
    if (idx.active(u)) out.push_back(u);
  }
  if (out.empty()) {
    throw DomainError("node " + std::to_string(v) + " is neither active nor on the frontier");
  }
  return out;
}

std::vector<NodeId> effective_parents(const DirectedGraph& g, const Cascade& c, NodeId v) {
  return effective_parents(g, CascadeIndex(c, g), v);
}

}  // namespace difflab
