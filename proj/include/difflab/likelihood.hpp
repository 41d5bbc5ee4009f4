#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"

namespace difflab {

enum class HorizonMode { infinite, finite };

/// p·r·exp(−r·Δt). Throws DomainError for Δt <= 0.
double x_density_asic(double p, double r, double dt);
/// p·exp(−r·Δt) + 1 − p. Throws DomainError for Δt < 0.
double y_survival_asic(double p, double r, double dt);
/// q·r·exp(−r·Δt). Throws DomainError for Δt <= 0.
double x_density_aslt(double q, double r, double dt);

/// Per-node density breakdown. `parents` are the effective parents ordered by
/// (activation time, node id); x_terms and y_terms align with them. For AsIC
/// non-override y_terms holds the failure factors 1 − p; AsLT leaves it empty.
struct NodeDensityTerms {
  std::vector<NodeId> parents;
  std::vector<double> x_terms;
  std::vector<double> y_terms;
  double h = 1.0;
  double log_h = 0.0;
};

/// Throws DomainError when v is inactive. Overloads taking a CascadeIndex
/// assume params were validated against (g, delay); the Cascade overloads
/// validate.
NodeDensityTerms density_terms_asic(const DirectedGraph& g, const CascadeIndex& idx,
                                    const AsicParams& params, DelayModel delay, NodeId v);
NodeDensityTerms density_terms_aslt(const DirectedGraph& g, const CascadeIndex& idx,
                                    const AsltParams& params, DelayModel delay, NodeId v);

double h_asic(const DirectedGraph& g, const CascadeIndex& idx, const AsicParams& params,
              DelayModel delay, NodeId v);
double h_asic(const DirectedGraph& g, const Cascade& c, const AsicParams& params,
              DelayModel delay, NodeId v);
double h_aslt(const DirectedGraph& g, const CascadeIndex& idx, const AsltParams& params,
              DelayModel delay, NodeId v);
double h_aslt(const DirectedGraph& g, const Cascade& c, const AsltParams& params,
              DelayModel delay, NodeId v);

/// Product over inactive children w of the per-link failure factor.
/// Finite mode uses the delay rate that governs (v, w) under `delay`.
/// Throws DomainError when v is inactive.
double g_asic(const DirectedGraph& g, const CascadeIndex& idx, const AsicParams& params, NodeId v,
              HorizonMode mode = HorizonMode::infinite, DelayModel delay = DelayModel::link);
double g_asic(const DirectedGraph& g, const Cascade& c, const AsicParams& params, NodeId v,
              HorizonMode mode = HorizonMode::infinite, DelayModel delay = DelayModel::link);

/// Survival of a frontier node up to the horizon. Under node-delay override
/// the active-parent tail is the ordered product matching the override
/// density. Throws DomainError when v is not on the frontier.
double g_aslt(const DirectedGraph& g, const CascadeIndex& idx, const AsltParams& params,
              DelayModel delay, NodeId v);
double g_aslt(const DirectedGraph& g, const Cascade& c, const AsltParams& params,
              DelayModel delay, NodeId v);

/// Where a log-likelihood became −∞.
struct LoglikDiagnostic {
  std::size_t cascade;
  NodeId node;
  std::string reason;
};

/// Sum over cascades of log h (active nodes) and log g (AsIC: active nodes,
/// AsLT: frontier nodes). Returns −infinity when any factor is exactly zero;
/// each offending (cascade, node) is appended to `diagnostics` when given.
/// Throws ValidationError for out-of-range nodes or invalid parameters.
double loglik_asic(const DirectedGraph& g, const AsicParams& params, DelayModel delay,
                   const CascadeSet& data, HorizonMode mode = HorizonMode::infinite,
                   std::vector<LoglikDiagnostic>* diagnostics = nullptr);
double loglik_aslt(const DirectedGraph& g, const AsltParams& params, DelayModel delay,
                   const CascadeSet& data, std::vector<LoglikDiagnostic>* diagnostics = nullptr);
double loglik(const DirectedGraph& g, const ModelParams& params, DelayModel delay,
              const CascadeSet& data, HorizonMode mode = HorizonMode::infinite,
              std::vector<LoglikDiagnostic>* diagnostics = nullptr);

}  // namespace difflab
