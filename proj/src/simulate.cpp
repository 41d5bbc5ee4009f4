#include "difflab/simulate.hpp"

#include <algorithm>

#include "difflab/errors.hpp"
#include "difflab/rng.hpp"

namespace difflab {

CascadeSimulator::CascadeSimulator(const DirectedGraph& g, const ModelParams& params,
                                   DelayModel delay)
    : g_(&g), model_(model_of(params)), delay_(delay) {
  validate(params, g, delay);
  const std::size_t m = g.edge_count();
  coef_.resize(m);
  rate_.resize(m);
  std::visit(
      [&](const auto& p) {
        for (EdgeId e = 0; e < m; ++e) {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, AsicParams>) {
            coef_[e] = p.prob(e);
          } else {
            coef_[e] = p.weight(g, e);
          }
          rate_[e] = p.rate(g, e, delay);
        }
      },
      params);
  const std::size_t n = g.node_count();
  stamp_.assign(n, 0);
  active_.assign(n, 0);
  decided_.assign(n, 0);
  has_threshold_.assign(n, 0);
  threshold_.assign(n, 0.0);
  accumulated_.assign(n, 0.0);
}

void CascadeSimulator::touch(NodeId v) {
  if (stamp_[v] == epoch_) return;
  stamp_[v] = epoch_;
  active_[v] = 0;
  decided_[v] = 0;
  has_threshold_[v] = 0;
  accumulated_[v] = 0.0;
}

double CascadeSimulator::threshold(NodeId v, Rng& rng) {
  if (!has_threshold_[v]) {
    threshold_[v] = rng.uniform();
    has_threshold_[v] = 1;
  }
  return threshold_[v];
}

void CascadeSimulator::activate(NodeId v, double t) {
  active_[v] = 1;
  out_.push_back({v, t});
}

void CascadeSimulator::schedule(double time, NodeId target, EdgeId edge, EventKind kind) {
  queue_.push({time, seq_++, target, edge, kind});
}

void CascadeSimulator::spread(NodeId u, double t, Rng& rng, SimulationTrace* trace) {
  for (EdgeId e = g_->out_begin(u); e < g_->out_end(u); ++e) {
    const NodeId v = g_->edge_target(e);
    touch(v);
    if (active_[v]) continue;

    if (model_ == ModelKind::asic) {
      // Non-override: the first successful parent fixes v's activation time.
      if (delay_ == DelayModel::node_non_override && decided_[v]) continue;
      const bool success = rng.bernoulli(coef_[e]);
      if (trace) trace->attempts.push_back({u, v, t, success});
      if (!success) continue;
      if (delay_ == DelayModel::node_non_override) decided_[v] = 1;
      schedule(t + rng.exponential(rate_[e]), v, e, EventKind::activate);
      continue;
    }

    switch (delay_) {
      case DelayModel::link:
        if (trace) trace->attempts.push_back({u, v, t, true});
        schedule(t + rng.exponential(rate_[e]), v, e, EventKind::arrival);
        break;
      case DelayModel::node_non_override: {
        if (decided_[v]) break;
        accumulated_[v] += coef_[e];
        const bool crossed = accumulated_[v] >= threshold(v, rng);
        if (trace) trace->attempts.push_back({u, v, t, crossed});
        if (crossed) {
          decided_[v] = 1;
          schedule(t + rng.exponential(rate_[e]), v, e, EventKind::activate);
        }
        break;
      }
      case DelayModel::node_override: {
        // After the crossing every newly active parent proposes a candidate
        // time; the earliest candidate wins.
        bool propose = decided_[v] != 0;
        if (!propose) {
          accumulated_[v] += coef_[e];
          propose = accumulated_[v] >= threshold(v, rng);
          if (propose) decided_[v] = 1;
        }
        if (trace) trace->attempts.push_back({u, v, t, propose});
        if (propose) schedule(t + rng.exponential(rate_[e]), v, e, EventKind::activate);
        break;
      }
    }
  }
}

Cascade CascadeSimulator::run(std::span<const NodeId> seeds, std::uint64_t rng_seed,
                              const SimulationOptions& options) {
  if (seeds.empty()) throw ValidationError("seed set must be non-empty");
  for (NodeId s : seeds) {
    if (s >= g_->node_count()) {
      throw ValidationError("seed node " + std::to_string(s) + " is outside the graph");
    }
  }
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    epoch_ = 1;
  }
  out_.clear();
  queue_ = {};
  seq_ = 0;
  Rng rng(rng_seed);

  for (NodeId s : seeds) {
    touch(s);
    if (!active_[s]) activate(s, 0.0);
  }
  const std::size_t seed_count = out_.size();
  for (std::size_t i = 0; i < seed_count; ++i) spread(out_[i].node, 0.0, rng, options.trace);

  while (!queue_.empty()) {
    const Event ev = queue_.top();
    queue_.pop();
    const NodeId v = ev.target;
    if (active_[v]) continue;
    if (ev.kind == EventKind::arrival) {
      accumulated_[v] += coef_[ev.edge];
      if (accumulated_[v] < threshold(v, rng)) continue;
    }
    activate(v, ev.time);
    spread(v, ev.time, rng, options.trace);
  }

  const double last = out_.back().time;
  return Cascade(out_, last + options.horizon_margin);
}

Cascade simulate_asic(const DirectedGraph& g, const AsicParams& params, DelayModel delay,
                      std::span<const NodeId> seeds, std::uint64_t rng_seed,
                      const SimulationOptions& options) {
  CascadeSimulator sim(g, params, delay);
  return sim.run(seeds, rng_seed, options);
}

Cascade simulate_aslt(const DirectedGraph& g, const AsltParams& params, DelayModel delay,
                      std::span<const NodeId> seeds, std::uint64_t rng_seed,
                      const SimulationOptions& options) {
  CascadeSimulator sim(g, params, delay);
  return sim.run(seeds, rng_seed, options);
}

CascadeSet generate_training_set(const DirectedGraph& g, const ModelParams& params,
                                 DelayModel delay, const TrainingSetOptions& options,
                                 std::uint64_t rng_seed) {
  if (options.min_len < 1 || options.target_active < options.min_len) {
    throw ValidationError("training set needs K >= min_len >= 1");
  }
  if (g.node_count() == 0) throw ValidationError("graph has no nodes");
  CascadeSimulator sim(g, params, delay);
  SimulationOptions sim_options;
  sim_options.horizon_margin = options.horizon_margin;

  CascadeSet out;
  std::size_t total = 0;
  for (std::size_t attempt = 0; attempt < options.max_attempts; ++attempt) {
    Rng pick(derive_seed(rng_seed, "training-seed", attempt));
    const NodeId seed = static_cast<NodeId>(pick.below(g.node_count()));
    Cascade c = sim.run({&seed, 1}, derive_seed(rng_seed, "training-run", attempt), sim_options);
    if (c.size() < options.min_len) continue;
    total += c.size();
    c.set_id("c" + std::to_string(out.size()));
    out.push_back(std::move(c));
    if (total >= options.target_active) return out;
  }
  throw ProgressError("reached " + std::to_string(total) + " of " +
                      std::to_string(options.target_active) + " active nodes after " +
                      std::to_string(options.max_attempts) + " simulation attempts");
}

}  // namespace difflab
