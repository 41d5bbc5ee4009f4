#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/em.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"

namespace difflab {

/// Hold-out cutoffs for one topic: every distinct activation time at or above
/// the median activation time tau0, ascending.
struct ObservationPeriods {
  std::vector<double> cutoffs;
  double tau0 = 0.0;
  std::size_t count() const noexcept { return cutoffs.size(); }
};

/// Throws InsufficientDataError when the cascades hold fewer than 2 events.
ObservationPeriods build_observation_periods(const CascadeSet& data);

/// Earliest activation with time >= cutoff, ties broken by (time, cascade
/// index, node id).
struct HeldOutEvent {
  std::size_t cascade = 0;
  NodeId node = 0;
  double time = 0.0;
};

struct CutoffTerm {
  double cutoff = 0.0;
  HeldOutEvent held_out;
  bool skipped = false;
  std::string skip_reason;
  double h = 0.0;
  double neg_log_h = 0.0;  // +inf when h == 0
  ModelParams params;      // fitted on the truncated data
};

struct ScoreOptions {
  /// Initialise each cutoff's fit from the previous cutoff's estimate.
  bool warm_start = true;
  /// Worker bound for cold-start mode (cutoffs are independent there).
  int threads = 1;
};

struct PredictiveScore {
  ModelKind model = ModelKind::asic;
  double score = 0.0;  // mean of neg_log_h over non-skipped cutoffs
  std::size_t used = 0;
  std::vector<CutoffTerm> terms;
};

/// For each cutoff tau: truncate every cascade to t < tau with horizon tau,
/// fit, and score −log h at the earliest held-out activation. Cutoffs whose
/// truncation cannot be fitted are skipped. Throws InsufficientDataError when
/// every cutoff is skipped.
PredictiveScore predictive_score(ModelKind model, const DirectedGraph& g, const CascadeSet& data,
                                 const ObservationPeriods& periods, const EmConfig& config,
                                 const ScoreOptions& options = {});

struct SelectionCutoff {
  double cutoff = 0.0;
  HeldOutEvent held_out;
  double h_asic = 0.0;
  double h_aslt = 0.0;
};

/// Scores of both models over the cutoffs that neither skipped.
struct SelectionReport {
  std::string topic;
  double score_asic = 0.0;
  double score_aslt = 0.0;
  /// J(winner; loser) = score_loser − score_winner (>= 0).
  double j = 0.0;
  /// J(AsIC; AsLT) = score_aslt − score_asic; positive favours AsIC.
  double j_asic_aslt = 0.0;
  ModelKind chosen = ModelKind::asic;
  bool indeterminate = false;
  double tau0 = 0.0;
  std::size_t skipped = 0;
  std::vector<SelectionCutoff> cutoffs;
};

/// Ties (|J| < 1e-12 or both scores infinite) are indeterminate and choose
/// AsIC. Throws InsufficientDataError when no cutoff survives for both models.
SelectionReport select_model(const DirectedGraph& g, const CascadeSet& data,
                             const EmConfig& config, const ScoreOptions& options = {});

/// Fills j, j_asic_aslt, chosen and indeterminate from the two scores.
void resolve_choice(SelectionReport& report);

}  // namespace difflab
