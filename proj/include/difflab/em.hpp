#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/evidence.hpp"
#include "difflab/graph.hpp"
#include "difflab/likelihood.hpp"
#include "difflab/params.hpp"

namespace difflab {

struct EmConfig {
  double init_p = 0.5;
  double init_q = 0.5;
  double init_r = 1.0;
  double tolerance = 1e-6;
  int max_iterations = 100;
  ParamMode mode = ParamMode::shared;
  DelayModel delay = DelayModel::link;
  /// AsIC survival of inactive children: infinite (1 − p) or finite, which
  /// honours each cascade's horizon. AsLT always uses its finite form.
  HorizonMode horizon = HorizonMode::infinite;
  /// Starting point overriding the init_* values (warm start). Must match the
  /// fitted model and mode.
  std::optional<ModelParams> initial;

  /// Throws ValidationError on a non-positive tolerance, max_iterations < 1
  /// or init values outside their domains.
  void validate() const;
};

struct EmTrace {
  /// loglik[0] is the initial value; loglik[s] follows the s-th update.
  std::vector<double> loglik;
  std::vector<ModelParams> snapshots;
  bool converged = false;
  int iterations = 0;
  /// Parameter values pulled back into range by the post-update clamp.
  std::size_t clamp_events = 0;
  /// Per-link parameters left at their current value for lack of evidence
  /// (counted once per fit).
  std::size_t untouched = 0;
};

/// Posterior weights of one E-step, aligned with the Evidence record lists.
struct Responsibilities {
  ModelKind model = ModelKind::asic;
  std::shared_ptr<const Evidence> evidence;
  std::vector<double> alpha;         // AsIC, per active-parent record
  std::vector<double> beta;          // AsIC, per active-parent record
  std::vector<double> gamma;         // AsIC finite horizon, per failure record
  std::vector<double> phi;           // AsLT, per active-parent record
  std::vector<double> varphi_slack;  // AsLT, per frontier segment
  std::vector<double> varphi;        // AsLT, per inactive-parent record
  std::vector<double> psi;           // AsLT, per active-parent tail record
  /// Log-likelihood at the parameters used for this E-step.
  double loglik = 0.0;
};

struct MStepStats {
  std::size_t clamp_events = 0;
  std::size_t untouched = 0;
};

/// Throws EstimationError when the data has zero likelihood under `params`.
Responsibilities e_step_asic(std::shared_ptr<const Evidence> evidence, const DirectedGraph& g,
                             const AsicParams& params,
                             HorizonMode horizon = HorizonMode::infinite);
Responsibilities e_step_asic(const DirectedGraph& g, const CascadeSet& data,
                             const AsicParams& params,
                             HorizonMode horizon = HorizonMode::infinite);
Responsibilities e_step_aslt(std::shared_ptr<const Evidence> evidence, const DirectedGraph& g,
                             const AsltParams& params);
Responsibilities e_step_aslt(const DirectedGraph& g, const CascadeSet& data,
                             const AsltParams& params);

/// Closed-form maximizers of the expected complete log-likelihood, clamped
/// to probabilities in [1e-12, 1 − 1e-12] and rates in [1e-12, 1e12].
/// Per-link parameters without evidence keep their value in `current`.
AsicParams m_step_asic(const DirectedGraph& g, const Responsibilities& resp, ParamMode mode,
                       const AsicParams& current, MStepStats* stats = nullptr);
AsltParams m_step_aslt(const DirectedGraph& g, const Responsibilities& resp, ParamMode mode,
                       const AsltParams& current, MStepStats* stats = nullptr);

/// Link-delay log-likelihood evaluated from flattened evidence. `horizon`
/// selects the AsIC survival form; AsLT always uses the finite one.
double evidence_loglik(const Evidence& evidence, const DirectedGraph& g, const ModelParams& params,
                       HorizonMode horizon = HorizonMode::infinite);

struct FitResult {
  ModelParams params;
  EmTrace trace;
};

/// Alternates E and M steps until the L1 change of all parameters is at most
/// the tolerance or max_iterations updates were made. Throws UnsupportedError
/// for node-delay models, InsufficientDataError for empty data and
/// EstimationError for a non-finite initial log-likelihood.
FitResult fit(ModelKind model, const DirectedGraph& g, const CascadeSet& data,
              const EmConfig& config);
FitResult fit(ModelKind model, const DirectedGraph& g, std::shared_ptr<const Evidence> evidence,
              const EmConfig& config);

/// |estimate − truth| / truth. Throws DomainError when truth is 0.
double param_error(double estimate, double truth);

}  // namespace difflab
