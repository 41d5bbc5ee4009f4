#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"

namespace difflab {

enum class InfluenceMethod { percolation, direct_mc };

/// Per-node influence degree estimates with Monte Carlo standard errors.
struct InfluenceTable {
  std::vector<double> sigma;
  std::vector<double> stderr_sigma;
  std::size_t samples = 0;
  InfluenceMethod method = InfluenceMethod::percolation;
};

/// Live-edge worlds: AsIC keeps each link with probability p; AsLT lets each
/// node keep at most one incoming link, (u, v) with probability q_{u,v}. Each
/// world's reach counts for all sources come from one SCC condensation.
/// Results are independent of `threads` (0 = default resolution).
InfluenceTable influence_percolation(const DirectedGraph& g, const ModelParams& params,
                                     std::size_t samples, std::uint64_t seed, int threads = 0);

/// Mean final cascade size over full continuous-time simulations per seed.
InfluenceTable influence_direct_mc(const DirectedGraph& g, const ModelParams& params,
                                   DelayModel delay, std::size_t samples, std::uint64_t seed,
                                   int threads = 0);

/// f(x) = |{v : sigma(v) >= x}| / |V|.
class CumulativeInfluence {
 public:
  explicit CumulativeInfluence(const InfluenceTable& table);
  explicit CumulativeInfluence(std::vector<double> sigma);
  double operator()(double x) const noexcept;
  /// Empirical quantile of sigma (nearest rank, q in [0, 1]).
  double quantile(double q) const;

 private:
  std::vector<double> sorted_;
};

/// Nodes ordered by descending score, ties by ascending node id.
struct RankedList {
  std::vector<NodeId> order;
  std::vector<double> score;  // indexed by node

  static RankedList from_scores(std::vector<double> scores);
};

/// |top-k(truth) ∩ top-k(candidate)| / k. Throws DomainError unless
/// 1 <= k <= both list sizes.
double ranking_similarity(const RankedList& truth, const RankedList& candidate, std::size_t k);

/// Similarity for k = 1..k_max.
std::vector<double> similarity_curve(const RankedList& truth, const RankedList& candidate,
                                     std::size_t k_max);

}  // namespace difflab
