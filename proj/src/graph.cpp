#include "difflab/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "difflab/errors.hpp"

namespace difflab {

DirectedGraph DirectedGraph::from_edges(std::size_t node_count,
                                        std::span<const std::pair<NodeId, NodeId>> edges) {
  std::vector<ExternalId> ids(node_count);
  std::iota(ids.begin(), ids.end(), ExternalId{0});
  return from_edges(node_count, edges, std::move(ids));
}

DirectedGraph DirectedGraph::from_edges(std::size_t node_count,
                                        std::span<const std::pair<NodeId, NodeId>> edges,
                                        std::vector<ExternalId> external_ids) {
  if (external_ids.size() != node_count) {
    throw ValidationError("external id table size does not match node count");
  }
  std::vector<std::pair<NodeId, NodeId>> sorted(edges.begin(), edges.end());
  for (const auto& [u, v] : sorted) {
    if (u >= node_count || v >= node_count) {
      throw ValidationError("edge (" + std::to_string(u) + "," + std::to_string(v) +
                            ") references a node outside [0, " +
                            std::to_string(node_count) + ")");
    }
    if (u == v) {
      throw ValidationError("self-link on node " + std::to_string(u));
    }
  }
  std::sort(sorted.begin(), sorted.end());
  auto last = std::unique(sorted.begin(), sorted.end());

  DirectedGraph g;
  g.duplicates_ = static_cast<std::size_t>(sorted.end() - last);
  sorted.erase(last, sorted.end());

  const std::size_t m = sorted.size();
  g.out_offsets_.assign(node_count + 1, 0);
  g.in_offsets_.assign(node_count + 1, 0);
  g.sources_.resize(m);
  g.targets_.resize(m);
  for (std::size_t e = 0; e < m; ++e) {
    g.sources_[e] = sorted[e].first;
    g.targets_[e] = sorted[e].second;
    ++g.out_offsets_[sorted[e].first + 1];
    ++g.in_offsets_[sorted[e].second + 1];
  }
  std::partial_sum(g.out_offsets_.begin(), g.out_offsets_.end(), g.out_offsets_.begin());
  std::partial_sum(g.in_offsets_.begin(), g.in_offsets_.end(), g.in_offsets_.begin());

  // Edges are visited in (source, target) order, so each parent list comes
  // out sorted by parent id.
  g.parents_.resize(m);
  g.in_edge_ids_.resize(m);
  std::vector<EdgeId> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t e = 0; e < m; ++e) {
    const EdgeId pos = cursor[g.targets_[e]]++;
    g.parents_[pos] = g.sources_[e];
    g.in_edge_ids_[pos] = static_cast<EdgeId>(e);
  }

  g.external_ids_ = std::move(external_ids);
  g.external_index_.reserve(node_count);
  for (std::size_t v = 0; v < node_count; ++v) {
    g.external_index_.emplace_back(g.external_ids_[v], static_cast<NodeId>(v));
  }
  std::sort(g.external_index_.begin(), g.external_index_.end());
  for (std::size_t i = 1; i < g.external_index_.size(); ++i) {
    if (g.external_index_[i].first == g.external_index_[i - 1].first) {
      throw ValidationError("duplicate external id " +
                            std::to_string(g.external_index_[i].first));
    }
  }
  return g;
}

std::optional<EdgeId> DirectedGraph::find_edge(NodeId u, NodeId v) const noexcept {
  if (u + 1 >= out_offsets_.size()) return std::nullopt;
  auto first = targets_.begin() + out_offsets_[u];
  auto last = targets_.begin() + out_offsets_[u + 1];
  auto it = std::lower_bound(first, last, v);
  if (it == last || *it != v) return std::nullopt;
  return static_cast<EdgeId>(it - targets_.begin());
}

std::optional<NodeId> DirectedGraph::internal_id(ExternalId id) const noexcept {
  auto it = std::lower_bound(external_index_.begin(), external_index_.end(),
                             std::make_pair(id, NodeId{0}));
  if (it == external_index_.end() || it->first != id) return std::nullopt;
  return it->second;
}

namespace {

bool parse_id(std::string_view token, ExternalId& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

DirectedGraph load_edge_list(std::string_view text) {
  std::vector<std::pair<ExternalId, ExternalId>> raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto tokens = split_ws(line);
    if (tokens.empty() || tokens.front().front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    if (tokens.size() != 2) {
      throw ParseError("expected two node ids, found " + std::to_string(tokens.size()) +
                           " fields",
                       line_no);
    }
    ExternalId u = 0;
    ExternalId v = 0;
    if (!parse_id(tokens[0], u) || !parse_id(tokens[1], v)) {
      throw ParseError("node ids must be non-negative integers", line_no);
    }
    if (u == v) {
      throw ValidationError("line " + std::to_string(line_no) + ": self-link on node " +
                            std::to_string(u));
    }
    raw.emplace_back(u, v);
    if (end == text.size()) break;
  }

  std::vector<ExternalId> ids;
  ids.reserve(raw.size() * 2);
  for (const auto& [u, v] : raw) {
    ids.push_back(u);
    ids.push_back(v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  auto dense = [&](ExternalId x) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), x) - ids.begin());
  };
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(raw.size());
  for (const auto& [u, v] : raw) edges.emplace_back(dense(u), dense(v));
  const std::size_t n = ids.size();
  return DirectedGraph::from_edges(n, edges, std::move(ids));
}

DirectedGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_edge_list(buf.str());
}

std::string serialize_edge_list(const DirectedGraph& g) {
  std::string out = "# nodes " + std::to_string(g.node_count()) + " edges " +
                    std::to_string(g.edge_count()) + "\n";
  for (NodeId u = 0; u < g.node_count(); ++u) {
    for (NodeId v : g.children(u)) {
      out += std::to_string(g.external_id(u));
      out += ' ';
      out += std::to_string(g.external_id(v));
      out += '\n';
    }
  }
  return out;
}

double mean_out_degree(const DirectedGraph& g) {
  if (g.node_count() == 0 || g.edge_count() == 0) {
    throw DomainError("mean out-degree is undefined for a graph without edges");
  }
  return static_cast<double>(g.edge_count()) / static_cast<double>(g.node_count());
}

}  // namespace difflab
