#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace difflab {

using NodeId = std::uint32_t;
using EdgeId = std::uint32_t;
using ExternalId = std::uint64_t;

/// Immutable directed graph without self-links.
///
/// Nodes are dense ids 0..n-1. Edges are stored in CSR order sorted by
/// (source, target); an edge's id is its position in that order, so the
/// children of v occupy the contiguous edge range [out_begin(v), out_end(v)).
/// The reverse CSR lists each node's parents together with the id of the
/// connecting edge. A remapping table keeps the external ids that appeared in
/// the input file.
class DirectedGraph {
 public:
  DirectedGraph() = default;

  /// Builds from dense internal ids. Self-links throw ValidationError,
  /// ids >= node_count throw ValidationError, duplicates are collapsed and
  /// counted.
  static DirectedGraph from_edges(std::size_t node_count,
                                  std::span<const std::pair<NodeId, NodeId>> edges);

  /// Same, attaching an external id per node (size must equal node_count).
  static DirectedGraph from_edges(std::size_t node_count,
                                  std::span<const std::pair<NodeId, NodeId>> edges,
                                  std::vector<ExternalId> external_ids);

  std::size_t node_count() const noexcept { return out_offsets_.empty() ? 0 : out_offsets_.size() - 1; }
  std::size_t edge_count() const noexcept { return targets_.size(); }

  std::span<const NodeId> children(NodeId v) const noexcept {
    return {targets_.data() + out_offsets_[v], targets_.data() + out_offsets_[v + 1]};
  }
  std::span<const NodeId> parents(NodeId v) const noexcept {
    return {parents_.data() + in_offsets_[v], parents_.data() + in_offsets_[v + 1]};
  }
  /// Edge ids aligned element-wise with parents(v).
  std::span<const EdgeId> in_edges(NodeId v) const noexcept {
    return {in_edge_ids_.data() + in_offsets_[v], in_edge_ids_.data() + in_offsets_[v + 1]};
  }

  EdgeId out_begin(NodeId v) const noexcept { return out_offsets_[v]; }
  EdgeId out_end(NodeId v) const noexcept { return out_offsets_[v + 1]; }
  std::size_t out_degree(NodeId v) const noexcept { return out_offsets_[v + 1] - out_offsets_[v]; }
  std::size_t in_degree(NodeId v) const noexcept { return in_offsets_[v + 1] - in_offsets_[v]; }

  NodeId edge_source(EdgeId e) const noexcept { return sources_[e]; }
  NodeId edge_target(EdgeId e) const noexcept { return targets_[e]; }

  std::optional<EdgeId> find_edge(NodeId u, NodeId v) const noexcept;
  bool has_edge(NodeId u, NodeId v) const noexcept { return find_edge(u, v).has_value(); }

  ExternalId external_id(NodeId v) const noexcept { return external_ids_[v]; }
  std::optional<NodeId> internal_id(ExternalId id) const noexcept;

  /// Number of duplicate input edges collapsed during construction.
  std::size_t duplicate_edges() const noexcept { return duplicates_; }

 private:
  std::vector<EdgeId> out_offsets_;
  std::vector<NodeId> sources_;
  std::vector<NodeId> targets_;
  std::vector<EdgeId> in_offsets_;
  std::vector<NodeId> parents_;
  std::vector<EdgeId> in_edge_ids_;
  std::vector<ExternalId> external_ids_;
  std::vector<std::pair<ExternalId, NodeId>> external_index_;  // sorted by external id
  std::size_t duplicates_ = 0;
};

/// Parses "u v" lines (any whitespace, '#' comments, LF or CRLF). External ids
/// are remapped to dense ids in ascending external-id order.
DirectedGraph load_edge_list(std::string_view text);
DirectedGraph load_edge_list_file(const std::string& path);

/// One "u v" line per edge using external ids, preceded by a comment header.
std::string serialize_edge_list(const DirectedGraph& g);

/// |E| / |V|. Throws DomainError on an empty graph or one without edges.
double mean_out_degree(const DirectedGraph& g);

enum class GraphKind { erdos_renyi, preferential_attachment };

/// Synthetic graph generator.
///  - erdos_renyi: each ordered pair (u, v), u != v, present independently with
///    probability `density` in [0, 1].
///  - preferential_attachment: `density` is the integer number m >= 1 of
///    attachments per arriving node; every attachment adds both directions.
DirectedGraph generate_synthetic(GraphKind kind, std::size_t n, double density,
                                 std::uint64_t seed);

}  // namespace difflab
