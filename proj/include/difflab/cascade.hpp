#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "difflab/graph.hpp"

namespace difflab {

struct Activation {
  NodeId node;
  double time;
  friend bool operator==(const Activation&, const Activation&) = default;
};

/// One observed diffusion result: activations in time order plus the
/// observation horizon T. Times are non-decreasing (several seeds share t=0),
/// each node appears at most once, and T >= the last activation time.
class Cascade {
 public:
  Cascade() = default;
  Cascade(std::vector<Activation> events, double horizon, std::string id = {},
          std::string topic = {});

  const std::vector<Activation>& events() const noexcept { return events_; }
  double horizon() const noexcept { return horizon_; }
  const std::string& id() const noexcept { return id_; }
  const std::string& topic() const noexcept { return topic_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

  /// First activation time (0 for an empty cascade).
  double initial_time() const noexcept { return events_.empty() ? 0.0 : events_.front().time; }
  double final_time() const noexcept { return events_.empty() ? 0.0 : events_.back().time; }

  /// Events with time < cutoff, observed up to horizon = cutoff.
  Cascade truncated(double cutoff) const;

  void set_topic(std::string topic) { topic_ = std::move(topic); }
  void set_id(std::string id) { id_ = std::move(id); }

  friend bool operator==(const Cascade&, const Cascade&) = default;

 private:
  std::vector<Activation> events_;
  double horizon_ = 0.0;
  std::string id_;
  std::string topic_;
};

using CascadeSet = std::vector<Cascade>;

/// Dense activation-time lookup for one cascade over a graph's node range.
/// Inactive nodes report +infinity.
class CascadeIndex {
 public:
  static constexpr double kInactive = std::numeric_limits<double>::infinity();

  CascadeIndex(const Cascade& cascade, const DirectedGraph& g);

  const Cascade& cascade() const noexcept { return *cascade_; }
  double time(NodeId v) const noexcept { return times_[v]; }
  bool active(NodeId v) const noexcept { return times_[v] != kInactive; }
  double initial_time() const noexcept { return cascade_->initial_time(); }
  double horizon() const noexcept { return cascade_->horizon(); }

 private:
  const Cascade* cascade_;
  std::vector<double> times_;
};

enum class DelayModel { link, node_non_override, node_override };

/// Inactive nodes with at least one active parent, ascending.
std::vector<NodeId> frontier(const DirectedGraph& g, const Cascade& c);
std::vector<NodeId> frontier(const DirectedGraph& g, const CascadeIndex& idx);

/// Parents that had a chance to influence v: parents active strictly before
/// t_v when v is active, all active parents when v is on the frontier.
/// Throws DomainError when v is neither. Ascending by node id.
std::vector<NodeId> effective_parents(const DirectedGraph& g, const Cascade& c, NodeId v);
std::vector<NodeId> effective_parents(const DirectedGraph& g, const CascadeIndex& idx, NodeId v);

/// Throws ValidationError if any event references a node outside g.
void check_cascade_nodes(const DirectedGraph& g, const Cascade& c);

}  // namespace difflab
