#include "difflab/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "difflab/errors.hpp"

namespace difflab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Parent {
  NodeId node;
  EdgeId edge;
  double time;
};

// Effective parents of an active node, ordered by (time, node id).
std::vector<Parent> ordered_parents(const DirectedGraph& g, const CascadeIndex& idx, NodeId v) {
  const double tv = idx.time(v);
  std::vector<Parent> out;
  auto ps = g.parents(v);
  auto es = g.in_edges(v);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const double tu = idx.time(ps[i]);
    if (tu < tv) out.push_back({ps[i], es[i], tu});
  }
  std::sort(out.begin(), out.end(), [](const Parent& a, const Parent& b) {
    return a.time != b.time ? a.time < b.time : a.node < b.node;
  });
  return out;
}

void require_active(const DirectedGraph& g, const CascadeIndex& idx, NodeId v) {
  if (v >= g.node_count() || !idx.active(v)) {
    throw DomainError("node " + std::to_string(v) + " is not active in the cascade");
  }
}

// The initial node has density 1; any other node without effective parents
// has density 0.
bool initial_or_orphan(const CascadeIndex& idx, NodeId v, const std::vector<Parent>& parents,
                       NodeDensityTerms& out) {
  if (!parents.empty()) return false;
  if (idx.time(v) == idx.initial_time()) {
    out.h = 1.0;
    out.log_h = 0.0;
  } else {
    out.h = 0.0;
    out.log_h = kNegInf;
  }
  return true;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

}  // namespace

double x_density_asic(double p, double r, double dt) {
  if (!(dt > 0.0)) throw DomainError("activation delay must be positive");
  return p * r * std::exp(-r * dt);
}

double y_survival_asic(double p, double r, double dt) {
  if (!(dt >= 0.0)) throw DomainError("elapsed time must be non-negative");
  return p * std::exp(-r * dt) + 1.0 - p;
}

double x_density_aslt(double q, double r, double dt) {
  if (!(dt > 0.0)) throw DomainError("activation delay must be positive");
  return q * r * std::exp(-r * dt);
}

NodeDensityTerms density_terms_asic(const DirectedGraph& g, const CascadeIndex& idx,
                                    const AsicParams& params, DelayModel delay, NodeId v) {
  require_active(g, idx, v);
  NodeDensityTerms out;
  const auto parents = ordered_parents(g, idx, v);
  for (const auto& pa : parents) out.parents.push_back(pa.node);
  if (initial_or_orphan(idx, v, parents, out)) return out;

  const double tv = idx.time(v);
  for (const auto& pa : parents) {
    const double p = params.prob(pa.edge);
    const double r = params.rate(g, pa.edge, delay);
    out.x_terms.push_back(x_density_asic(p, r, tv - pa.time));
    out.y_terms.push_back(delay == DelayModel::node_non_override
                              ? 1.0 - p
                              : y_survival_asic(p, r, tv - pa.time));
  }

  if (delay == DelayModel::node_non_override) {
    double h = 0.0;
    double fail = 1.0;
    for (std::size_t j = 0; j < parents.size(); ++j) {
      h += out.x_terms[j] * fail;
      fail *= out.y_terms[j];
    }
    out.h = h;
    out.log_h = safe_log(h);
    return out;
  }

  // Π𝒴 · Σ 𝒳/𝒴, evaluated in log space; falls back to the expanded sum when
  // a survival factor underflows.
  const bool positive = std::all_of(out.y_terms.begin(), out.y_terms.end(),
                                    [](double y) { return y > 0.0; });
  if (positive) {
    double log_prod = 0.0;
    double ratio = 0.0;
    for (std::size_t j = 0; j < parents.size(); ++j) {
      log_prod += std::log(out.y_terms[j]);
      ratio += out.x_terms[j] / out.y_terms[j];
    }
    out.log_h = ratio > 0.0 ? log_prod + std::log(ratio) : kNegInf;
    out.h = std::exp(out.log_h);
    return out;
  }
  double h = 0.0;
  for (std::size_t j = 0; j < parents.size(); ++j) {
    double term = out.x_terms[j];
    for (std::size_t z = 0; z < parents.size(); ++z) {
      if (z != j) term *= out.y_terms[z];
    }
    h += term;
  }
  out.h = h;
  out.log_h = safe_log(h);
  return out;
}

NodeDensityTerms density_terms_aslt(const DirectedGraph& g, const CascadeIndex& idx,
                                    const AsltParams& params, DelayModel delay, NodeId v) {
  require_active(g, idx, v);
  NodeDensityTerms out;
  const auto parents = ordered_parents(g, idx, v);
  for (const auto& pa : parents) out.parents.push_back(pa.node);
  if (initial_or_orphan(idx, v, parents, out)) return out;

  const double tv = idx.time(v);
  const std::size_t J = parents.size();
  if (delay == DelayModel::node_override) {
    // Suffix sums of r_v·(t_v − t_{u_i}) over i >= j.
    std::vector<double> tail(J + 1, 0.0);
    for (std::size_t j = J; j-- > 0;) {
      tail[j] = tail[j + 1] + params.rate(g, parents[j].edge, delay) * (tv - parents[j].time);
    }
    for (std::size_t j = 0; j < J; ++j) {
      const double q = params.weight(g, parents[j].edge);
      const double r = params.rate(g, parents[j].edge, delay);
      out.x_terms.push_back(q * static_cast<double>(J - j) * r * std::exp(-tail[j]));
    }
  } else {
    for (const auto& pa : parents) {
      out.x_terms.push_back(x_density_aslt(params.weight(g, pa.edge),
                                           params.rate(g, pa.edge, delay), tv - pa.time));
    }
  }
  out.h = std::accumulate(out.x_terms.begin(), out.x_terms.end(), 0.0);
  out.log_h = safe_log(out.h);
  return out;
}

double h_asic(const DirectedGraph& g, const CascadeIndex& idx, const AsicParams& params,
              DelayModel delay, NodeId v) {
  return density_terms_asic(g, idx, params, delay, v).h;
}

double h_asic(const DirectedGraph& g, const Cascade& c, const AsicParams& params,
              DelayModel delay, NodeId v) {
  params.validate(g, delay);
  return h_asic(g, CascadeIndex(c, g), params, delay, v);
}

double h_aslt(const DirectedGraph& g, const CascadeIndex& idx, const AsltParams& params,
              DelayModel delay, NodeId v) {
  return density_terms_aslt(g, idx, params, delay, v).h;
}

double h_aslt(const DirectedGraph& g, const Cascade& c, const AsltParams& params,
              DelayModel delay, NodeId v) {
  params.validate(g, delay);
  return h_aslt(g, CascadeIndex(c, g), params, delay, v);
}

double g_asic(const DirectedGraph& g, const CascadeIndex& idx, const AsicParams& params, NodeId v,
              HorizonMode mode, DelayModel delay) {
  require_active(g, idx, v);
  const double elapsed = idx.horizon() - idx.time(v);
  double out = 1.0;
  for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) {
    if (idx.active(g.edge_target(e))) continue;
    const double p = params.prob(e);
    out *= mode == HorizonMode::infinite
               ? 1.0 - p
               : p * std::exp(-params.rate(g, e, delay) * elapsed) + 1.0 - p;
  }
  return out;
}

double g_asic(const DirectedGraph& g, const Cascade& c, const AsicParams& params, NodeId v,
              HorizonMode mode, DelayModel delay) {
  params.validate(g, delay);
  return g_asic(g, CascadeIndex(c, g), params, v, mode, delay);
}

double g_aslt(const DirectedGraph& g, const CascadeIndex& idx, const AsltParams& params,
              DelayModel delay, NodeId v) {
  if (v >= g.node_count() || idx.active(v)) {
    throw DomainError("node " + std::to_string(v) + " is not on the frontier");
  }
  const double T = idx.horizon();
  double out = params.slack(g, v);
  std::vector<Parent> active;
  auto ps = g.parents(v);
  auto es = g.in_edges(v);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (idx.active(ps[i])) {
      active.push_back({ps[i], es[i], idx.time(ps[i])});
    } else {
      out += params.weight(g, es[i]);
    }
  }
  if (active.empty()) {
    throw DomainError("node " + std::to_string(v) + " is not on the frontier");
  }
  if (delay == DelayModel::node_override) {
    std::sort(active.begin(), active.end(), [](const Parent& a, const Parent& b) {
      return a.time != b.time ? a.time < b.time : a.node < b.node;
    });
    double tail = 0.0;
    for (std::size_t j = active.size(); j-- > 0;) {
      tail += params.rate(g, active[j].edge, delay) * (T - active[j].time);
      out += params.weight(g, active[j].edge) * std::exp(-tail);
    }
    return out;
  }
  for (const auto& pa : active) {
    out += params.weight(g, pa.edge) * std::exp(-params.rate(g, pa.edge, delay) * (T - pa.time));
  }
  return out;
}

double g_aslt(const DirectedGraph& g, const Cascade& c, const AsltParams& params,
              DelayModel delay, NodeId v) {
  params.validate(g, delay);
  return g_aslt(g, CascadeIndex(c, g), params, delay, v);
}

double loglik_asic(const DirectedGraph& g, const AsicParams& params, DelayModel delay,
                   const CascadeSet& data, HorizonMode mode,
                   std::vector<LoglikDiagnostic>* diagnostics) {
  params.validate(g, delay);
  double total = 0.0;
  for (std::size_t m = 0; m < data.size(); ++m) {
    const CascadeIndex idx(data[m], g);
    for (const auto& a : data[m].events()) {
      const double log_h = density_terms_asic(g, idx, params, delay, a.node).log_h;
      const double log_g = safe_log(g_asic(g, idx, params, a.node, mode, delay));
      if (log_h == kNegInf || log_g == kNegInf) {
        if (diagnostics) {
          diagnostics->push_back(
              {m, a.node, log_h == kNegInf ? "zero activation density" : "zero survival"});
        }
        total = kNegInf;
        continue;
      }
      total += log_h + log_g;
    }
  }
  return total;
}

double loglik_aslt(const DirectedGraph& g, const AsltParams& params, DelayModel delay,
                   const CascadeSet& data, std::vector<LoglikDiagnostic>* diagnostics) {
  params.validate(g, delay);
  double total = 0.0;
  for (std::size_t m = 0; m < data.size(); ++m) {
    const CascadeIndex idx(data[m], g);
    for (const auto& a : data[m].events()) {
      const double log_h = density_terms_aslt(g, idx, params, delay, a.node).log_h;
      if (log_h == kNegInf) {
        if (diagnostics) diagnostics->push_back({m, a.node, "zero activation density"});
        total = kNegInf;
        continue;
      }
      total += log_h;
    }
    for (NodeId w : frontier(g, idx)) {
      const double log_g = safe_log(g_aslt(g, idx, params, delay, w));
      if (log_g == kNegInf) {
        if (diagnostics) diagnostics->push_back({m, w, "zero survival"});
        total = kNegInf;
        continue;
      }
      total += log_g;
    }
  }
  return total;
}

double loglik(const DirectedGraph& g, const ModelParams& params, DelayModel delay,
              const CascadeSet& data, HorizonMode mode,
              std::vector<LoglikDiagnostic>* diagnostics) {
  if (const auto* p = std::get_if<AsicParams>(&params)) {
    return loglik_asic(g, *p, delay, data, mode, diagnostics);
  }
  return loglik_aslt(g, std::get<AsltParams>(params), delay, data, diagnostics);
}

}  // namespace difflab
