#pragma once

#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"

namespace difflab {

/// One activation attempt (AsIC) or weight contribution (AsLT) issued by an
/// active node toward an inactive child.
struct AttemptRecord {
  NodeId source;
  NodeId target;
  double time;
  bool success;
};

struct SimulationTrace {
  std::vector<AttemptRecord> attempts;
};

struct SimulationOptions {
  /// Observation horizon = last activation time + margin.
  double horizon_margin = 1000.0;
  /// Optional instrumentation sink.
  SimulationTrace* trace = nullptr;
};

/// Event-driven continuous-time simulator for AsIC and AsLT under the three
/// delay semantics. Parameters are validated once at construction; each run
/// is a pure function of (seeds, rng_seed). Not thread-safe: use one instance
/// per thread over a shared graph.
class CascadeSimulator {
 public:
  CascadeSimulator(const DirectedGraph& g, const ModelParams& params, DelayModel delay);

  /// Seeds activate at t = 0. Events come out in activation-time order, ties
  /// resolved by scheduling order.
  Cascade run(std::span<const NodeId> seeds, std::uint64_t rng_seed,
              const SimulationOptions& options = {});

  ModelKind model() const noexcept { return model_; }

 private:
  enum class EventKind : std::uint8_t { activate, arrival };
  struct Event {
    double time;
    std::uint64_t seq;
    NodeId target;
    EdgeId edge;
    EventKind kind;
    bool operator>(const Event& o) const noexcept {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  void touch(NodeId v);
  double threshold(NodeId v, class Rng& rng);
  void activate(NodeId v, double t);
  void spread(NodeId u, double t, class Rng& rng, SimulationTrace* trace);
  void schedule(double time, NodeId target, EdgeId edge, EventKind kind);

  const DirectedGraph* g_;
  ModelKind model_;
  DelayModel delay_;
  std::vector<double> coef_;  // p (AsIC) or q (AsLT) per edge
  std::vector<double> rate_;  // delay rate per edge (node rate for node-delay)

  // Epoch-stamped per-node state, reset lazily so a run costs O(touched).
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> active_;
  std::vector<std::uint8_t> decided_;  // node-delay: activation time committed / threshold crossed
  std::vector<std::uint8_t> has_threshold_;
  std::vector<double> threshold_;
  std::vector<double> accumulated_;

  std::vector<Activation> out_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
};

Cascade simulate_asic(const DirectedGraph& g, const AsicParams& params, DelayModel delay,
                      std::span<const NodeId> seeds, std::uint64_t rng_seed,
                      const SimulationOptions& options = {});

Cascade simulate_aslt(const DirectedGraph& g, const AsltParams& params, DelayModel delay,
                      std::span<const NodeId> seeds, std::uint64_t rng_seed,
                      const SimulationOptions& options = {});

struct TrainingSetOptions {
  std::size_t target_active = 1000;  // K
  std::size_t min_len = 10;
  std::size_t max_attempts = 100000;
  double horizon_margin = 1000.0;
};

/// Simulates from uniformly random single seeds, keeping cascades with at
/// least min_len activations, until the kept cascades hold >= K activations.
/// Throws ProgressError when the attempt budget runs out.
CascadeSet generate_training_set(const DirectedGraph& g, const ModelParams& params,
                                 DelayModel delay, const TrainingSetOptions& options,
                                 std::uint64_t rng_seed);

}  // namespace difflab
