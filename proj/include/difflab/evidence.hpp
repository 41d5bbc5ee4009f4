#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/params.hpp"

namespace difflab {

/// Cascade data flattened into the record lists the link-delay likelihoods
/// and EM updates iterate over. Built once per dataset; parameters are
/// gathered by edge id on each pass.
///
/// Active segments: one per (cascade, active node with effective parents),
/// holding one record per effective parent with Δt = t_v − t_u.
/// AsIC failures: one record per (cascade, active u, inactive child), with
/// multiplicity across cascades, carrying the elapsed time T − t_u.
/// AsLT frontier segments: one per (cascade, frontier node), holding tail
/// records for active parents (elapsed = T − t_u) and the ids of the edges
/// from inactive parents.
struct Evidence {
  ModelKind model = ModelKind::asic;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t initial_activations = 0;

  std::vector<std::uint32_t> seg_begin{0};
  std::vector<std::uint32_t> seg_cascade;
  std::vector<NodeId> seg_node;
  std::vector<EdgeId> par_edge;
  std::vector<double> par_dt;

  std::vector<EdgeId> fail_edge;
  std::vector<std::uint32_t> fail_cascade;
  std::vector<double> fail_elapsed;  // T − t_u

  std::vector<std::uint32_t> fr_tail_begin{0};
  std::vector<std::uint32_t> fr_inactive_begin{0};
  std::vector<std::uint32_t> fr_cascade;
  std::vector<NodeId> fr_node;
  std::vector<EdgeId> tail_edge;
  std::vector<double> tail_elapsed;
  std::vector<EdgeId> inactive_edge;

  std::size_t segment_count() const noexcept { return seg_node.size(); }
  std::size_t frontier_count() const noexcept { return fr_node.size(); }

  std::optional<std::size_t> find_segment(std::size_t cascade, NodeId v) const;
  std::optional<std::size_t> find_frontier(std::size_t cascade, NodeId v) const;
  /// Index of the record for edge e inside segment s.
  std::optional<std::size_t> find_parent_record(std::size_t segment, EdgeId e) const;
};

/// Throws ValidationError for nodes outside g and EstimationError for an
/// activation after the initial time with no earlier active parent.
Evidence build_evidence(const DirectedGraph& g, const CascadeSet& data, ModelKind model);

}  // namespace difflab
