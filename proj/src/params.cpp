#include "difflab/params.hpp"

#include <cmath>

#include "difflab/errors.hpp"

namespace difflab {

std::string to_string(ModelKind m) { return m == ModelKind::asic ? "asic" : "aslt"; }

std::string to_string(ParamMode m) { return m == ParamMode::shared ? "shared" : "per_link"; }

std::string to_string(DelayModel d) {
  switch (d) {
    case DelayModel::link:
      return "link";
    case DelayModel::node_non_override:
      return "node-no";
    case DelayModel::node_override:
      return "node-ov";
  }
  return "link";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "asic") return ModelKind::asic;
  if (s == "aslt") return ModelKind::aslt;
  throw ValidationError("unknown model '" + s + "' (expected asic or aslt)");
}

ParamMode parse_param_mode(const std::string& s) {
  if (s == "shared") return ParamMode::shared;
  if (s == "per_link" || s == "per-link") return ParamMode::per_link;
  throw ValidationError("unknown parameter mode '" + s + "' (expected shared or per-link)");
}

DelayModel parse_delay_model(const std::string& s) {
  if (s == "link") return DelayModel::link;
  if (s == "node-no" || s == "node_non_override") return DelayModel::node_non_override;
  if (s == "node-ov" || s == "node_override") return DelayModel::node_override;
  throw ValidationError("unknown delay model '" + s + "' (expected link, node-no or node-ov)");
}

namespace {

void check_rates(const ParamVector& r, ParamMode mode, const DirectedGraph& g, DelayModel d) {
  if (mode == ParamMode::per_link) {
    const std::size_t want = d == DelayModel::link ? g.edge_count() : g.node_count();
    if (r.is_shared() || r.size() != want) {
      throw ValidationError("per-link mode needs " + std::to_string(want) +
                            (d == DelayModel::link ? " per-edge" : " per-node") +
                            " delay rates, got " + std::to_string(r.size()));
    }
  } else if (!r.is_shared()) {
    throw ValidationError("shared mode needs a scalar delay rate");
  }
  for (double x : r.values()) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw ValidationError("delay rates must be positive and finite");
    }
  }
}

}  // namespace

AsicParams AsicParams::shared(double p, double r) {
  return {ParamMode::shared, ParamVector::shared(p), ParamVector::shared(r)};
}

AsicParams AsicParams::per_link(std::vector<double> p, std::vector<double> r) {
  return {ParamMode::per_link, ParamVector::per_item(std::move(p)),
          ParamVector::per_item(std::move(r))};
}

void AsicParams::validate(const DirectedGraph& g, DelayModel d) const {
  if (mode == ParamMode::per_link) {
    if (p.is_shared() || p.size() != g.edge_count()) {
      throw ValidationError("per-link mode needs one diffusion probability per edge");
    }
  } else if (!p.is_shared()) {
    throw ValidationError("shared mode needs a scalar diffusion probability");
  }
  for (double x : p.values()) {
    if (!(x >= 0.0 && x <= 1.0)) {
      throw ValidationError("diffusion probabilities must lie in [0, 1]");
    }
  }
  check_rates(r, mode, g, d);
}

AsltParams AsltParams::shared(double q, double r) {
  return {ParamMode::shared, ParamVector::shared(q), ParamVector::shared(r)};
}

AsltParams AsltParams::per_link(std::vector<double> q, std::vector<double> r) {
  return {ParamMode::per_link, ParamVector::per_item(std::move(q)),
          ParamVector::per_item(std::move(r))};
}

double AsltParams::slack(const DirectedGraph& g, NodeId v) const noexcept {
  if (g.in_degree(v) == 0) return 1.0;
  if (mode == ParamMode::shared) return 1.0 - q[0];
  double total = 0.0;
  for (EdgeId e : g.in_edges(v)) total += q[e];
  return 1.0 - total;
}

void AsltParams::validate(const DirectedGraph& g, DelayModel d) const {
  if (mode == ParamMode::shared) {
    if (!q.is_shared()) throw ValidationError("shared mode needs a scalar weight coefficient");
    if (!(q[0] > 0.0 && q[0] <= 1.0)) {
      throw ValidationError("shared weight coefficient q must lie in (0, 1]");
    }
  } else {
    if (q.is_shared() || q.size() != g.edge_count()) {
      throw ValidationError("per-link mode needs one weight per edge");
    }
    for (double x : q.values()) {
      if (!(x > 0.0) || !std::isfinite(x)) throw ValidationError("link weights must be positive");
    }
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (slack(g, v) < -1e-12) {
        throw ValidationError("incoming weights of node " + std::to_string(v) +
                              " sum to more than 1");
      }
    }
  }
  check_rates(r, mode, g, d);
}

void validate(const ModelParams& p, const DirectedGraph& g, DelayModel d) {
  std::visit([&](const auto& x) { x.validate(g, d); }, p);
}

}  // namespace difflab
