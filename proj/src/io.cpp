#include "difflab/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "difflab/errors.hpp"

namespace difflab {

using nlohmann::json;

namespace {

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

NodeId lookup(const DirectedGraph& g, ExternalId id, const std::string& where) {
  auto v = g.internal_id(id);
  if (!v) throw ValidationError(where + ": node " + std::to_string(id) + " is not in the graph");
  return *v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    pos = nl + 1;
  }
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    std::size_t comma = line.find(',', pos);
    out.emplace_back(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::string edge_key(const DirectedGraph& g, EdgeId e) {
  return std::to_string(g.external_id(g.edge_source(e))) + "->" +
         std::to_string(g.external_id(g.edge_target(e)));
}

json vector_json(const ParamVector& v, const DirectedGraph& g, bool per_node) {
  if (v.is_shared()) return v[0];
  json m = json::object();
  for (std::size_t i = 0; i < v.size(); ++i) {
    m[per_node ? std::to_string(g.external_id(static_cast<NodeId>(i)))
               : edge_key(g, static_cast<EdgeId>(i))] = v[i];
  }
  return m;
}

ParamVector vector_from_json(const json& j, const DirectedGraph& g, bool per_node,
                             const std::string& name) {
  if (j.is_number()) return ParamVector::shared(j.get<double>());
  if (!j.is_object()) throw ValidationError("parameter '" + name + "' must be a number or a map");
  const std::size_t size = per_node ? g.node_count() : g.edge_count();
  std::vector<double> values(size, std::nan(""));
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    std::size_t idx;
    try {
      if (per_node) {
        idx = lookup(g, std::stoull(key), name);
      } else {
        const auto arrow = key.find("->");
        if (arrow == std::string::npos) throw ValidationError("bad edge key '" + key + "'");
        const NodeId u = lookup(g, std::stoull(key.substr(0, arrow)), name);
        const NodeId v = lookup(g, std::stoull(key.substr(arrow + 2)), name);
        auto e = g.find_edge(u, v);
        if (!e) throw ValidationError("parameter '" + name + "': no edge " + key);
        idx = *e;
      }
    } catch (const std::logic_error&) {
      throw ValidationError("parameter '" + name + "': bad key '" + key + "'");
    }
    values[idx] = it.value().get<double>();
  }
  for (double x : values) {
    if (std::isnan(x)) throw ValidationError("parameter '" + name + "' is missing entries");
  }
  return ParamVector::per_item(std::move(values));
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

std::string write_cascades_jsonl(const CascadeSet& data, const DirectedGraph& g) {
  std::string out;
  for (const auto& c : data) {
    json j;
    j["id"] = c.id();
    json events = json::array();
    for (const auto& a : c.events()) events.push_back({g.external_id(a.node), a.time});
    j["events"] = std::move(events);
    j["horizon"] = c.horizon();
    if (!c.topic().empty()) j["topic"] = c.topic();
    out += j.dump();
    out += '\n';
  }
  return out;
}

CascadeSet read_cascades_jsonl(std::string_view text, const DirectedGraph& g) {
  CascadeSet out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    if (lines[i].find_first_not_of(" \t") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(lines[i]);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      const std::string where = "line " + std::to_string(line_no);
      std::vector<Activation> events;
      for (const auto& ev : j.at("events")) {
        if (!ev.is_array() || ev.size() != 2) throw ParseError("event must be [node, time]", line_no);
        events.push_back({lookup(g, ev[0].get<ExternalId>(), where), ev[1].get<double>()});
      }
      const double horizon = j.contains("horizon") ? j["horizon"].get<double>()
                                                   : (events.empty() ? 0.0 : events.back().time);
      std::string id = j.contains("id") ? j["id"].get<std::string>() : std::to_string(out.size());
      std::string topic = j.contains("topic") ? j["topic"].get<std::string>() : std::string();
      out.emplace_back(std::move(events), horizon, std::move(id), std::move(topic));
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed cascade: ") + e.what(), line_no);
    } catch (const ValidationError& e) {
      throw ValidationError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string params_to_json(const ModelParams& params, const DirectedGraph& g, DelayModel delay,
                           int iterations, double loglik) {
  json j;
  const bool per_node_r = delay != DelayModel::link;
  std::visit(
      [&](const auto& p) {
        j["model"] = to_string(model_of(params));
        j["mode"] = to_string(p.mode);
        j["delay"] = to_string(delay);
        if constexpr (std::is_same_v<std::decay_t<decltype(p)>, AsicParams>) {
          j["p"] = vector_json(p.p, g, false);
        } else {
          j["q"] = vector_json(p.q, g, false);
        }
        j["r"] = vector_json(p.r, g, per_node_r);
      },
      params);
  j["iterations"] = iterations;
  j["loglik"] = number_or_null(loglik);
  return j.dump(2) + "\n";
}

ModelParams params_from_json(std::string_view text, const DirectedGraph& g, DelayModel delay) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid parameter JSON: ") + e.what());
  }
  try {
    const ModelKind model = parse_model_kind(j.at("model").get<std::string>());
    const ParamMode mode = parse_param_mode(j.at("mode").get<std::string>());
    const bool per_node_r = delay != DelayModel::link;
    ModelParams out;
    if (model == ModelKind::asic) {
      out = AsicParams{mode, vector_from_json(j.at("p"), g, false, "p"),
                       vector_from_json(j.at("r"), g, per_node_r, "r")};
    } else {
      out = AsltParams{mode, vector_from_json(j.at("q"), g, false, "q"),
                       vector_from_json(j.at("r"), g, per_node_r, "r")};
    }
    validate(out, g, delay);
    return out;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed parameter file: ") + e.what());
  }
}

std::string influence_csv(const InfluenceTable& table, const DirectedGraph& g) {
  std::string out = "node,sigma,stderr\n";
  for (std::size_t v = 0; v < table.sigma.size(); ++v) {
    out += std::to_string(g.external_id(static_cast<NodeId>(v))) + "," +
           fmt_double(table.sigma[v]) + "," + fmt_double(table.stderr_sigma[v]) + "\n";
  }
  return out;
}

std::string ranking_csv(const RankedList& list, const DirectedGraph& g) {
  std::string out = "rank,node,score\n";
  for (std::size_t i = 0; i < list.order.size(); ++i) {
    const NodeId v = list.order[i];
    out += std::to_string(i + 1) + "," + std::to_string(g.external_id(v)) + "," +
           fmt_double(list.score[v]) + "\n";
  }
  return out;
}

RankedList read_ranking_csv(std::string_view text, const DirectedGraph& g) {
  const auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty ranking file", 1);
  const auto header = split_csv(lines[0]);
  int node_col = -1, score_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "node") node_col = static_cast<int>(c);
    if (header[c] == "score" || header[c] == "sigma") score_col = static_cast<int>(c);
  }
  if (node_col < 0 || score_col < 0) {
    throw ParseError("expected a header with 'node' and 'score' or 'sigma' columns", 1);
  }
  std::vector<double> scores(g.node_count(), -std::numeric_limits<double>::infinity());
  std::vector<std::uint8_t> seen(g.node_count(), 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto cols = split_csv(lines[i]);
    if (cols.size() <= static_cast<std::size_t>(std::max(node_col, score_col))) {
      throw ParseError("too few columns", i + 1);
    }
    try {
      const NodeId v = lookup(g, std::stoull(cols[node_col]), "line " + std::to_string(i + 1));
      scores[v] = std::stod(cols[score_col]);
      seen[v] = 1;
    } catch (const std::logic_error&) {
      throw ParseError("non-numeric field", i + 1);
    }
  }
  for (std::size_t v = 0; v < seen.size(); ++v) {
    if (!seen[v]) throw ValidationError("ranking has no score for node " +
                                        std::to_string(g.external_id(static_cast<NodeId>(v))));
  }
  return RankedList::from_scores(std::move(scores));
}

std::string similarity_csv(const std::vector<double>& curve) {
  std::string out = "k,similarity\n";
  for (std::size_t k = 0; k < curve.size(); ++k) {
    out += std::to_string(k + 1) + "," + fmt_double(curve[k]) + "\n";
  }
  return out;
}

std::string selection_report_json(const SelectionReport& report, const DirectedGraph& g) {
  json j;
  j["topic"] = report.topic;
  j["score_asic"] = number_or_null(report.score_asic);
  j["score_aslt"] = number_or_null(report.score_aslt);
  j["j"] = number_or_null(report.j);
  j["j_asic_aslt"] = number_or_null(report.j_asic_aslt);
  j["chosen"] = to_string(report.chosen);
  j["indeterminate"] = report.indeterminate;
  j["tau0"] = report.tau0;
  j["skipped"] = report.skipped;
  json cuts = json::array();
  for (const auto& c : report.cutoffs) {
    cuts.push_back({{"cutoff", c.cutoff},
                    {"cascade", c.held_out.cascade},
                    {"node", g.external_id(c.held_out.node)},
                    {"time", c.held_out.time},
                    {"h_asic", c.h_asic},
                    {"h_aslt", c.h_aslt}});
  }
  j["cutoffs"] = std::move(cuts);
  return j.dump(2) + "\n";
}

std::vector<std::pair<std::string, std::string>> read_topic_labels(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty() || lines[i][0] == '#') continue;
    const auto cols = split_csv(lines[i]);
    if (cols.size() != 2) throw ParseError("expected 'id,topic'", i + 1);
    if (i == 0 && cols[0] == "id" && cols[1] == "topic") continue;
    out.emplace_back(cols[0], cols[1]);
  }
  return out;
}

}  // namespace difflab
