#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "difflab/cascade.hpp"
#include "difflab/graph.hpp"
#include "difflab/influence.hpp"
#include "difflab/model_select.hpp"
#include "difflab/params.hpp"

namespace difflab {

std::string read_text_file(const std::string& path);
/// Writes atomically enough for CLI use: truncate then write; throws Error on failure.
void write_text_file(const std::string& path, std::string_view content);

/// One JSON object per line: {"id", "events": [[node, t], ...], "horizon"}
/// plus "topic" when set. Node ids are the graph's external ids; times are
/// written with round-trip precision.
std::string write_cascades_jsonl(const CascadeSet& data, const DirectedGraph& g);
/// Blank lines are skipped. Throws ParseError (with line number) on malformed
/// JSON and ValidationError on unknown nodes or invalid cascades.
CascadeSet read_cascades_jsonl(std::string_view text, const DirectedGraph& g);

/// {"model", "mode", "delay", "p"|"q", "r", "iterations", "loglik"}; per-link
/// values are maps keyed "u->v" (edges) or "v" (per-node rates) in external ids.
std::string params_to_json(const ModelParams& params, const DirectedGraph& g, DelayModel delay,
                           int iterations = 0, double loglik = 0.0);
ModelParams params_from_json(std::string_view text, const DirectedGraph& g, DelayModel delay);

/// "node,sigma,stderr".
std::string influence_csv(const InfluenceTable& table, const DirectedGraph& g);
/// "rank,node,score".
std::string ranking_csv(const RankedList& list, const DirectedGraph& g);
/// Reads either CSV layout above back into a ranking by score.
RankedList read_ranking_csv(std::string_view text, const DirectedGraph& g);
/// "k,similarity" for k = 1..curve.size().
std::string similarity_csv(const std::vector<double>& curve);

/// {"topic", "score_asic", "score_aslt", "j", "j_asic_aslt", "chosen",
///  "indeterminate", "tau0", "skipped", "cutoffs": [...]}.
std::string selection_report_json(const SelectionReport& report, const DirectedGraph& g);

/// "id,topic" lines (header optional); returns topic per cascade id.
std::vector<std::pair<std::string, std::string>> read_topic_labels(std::string_view text);

}  // namespace difflab
