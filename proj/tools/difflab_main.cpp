#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "difflab/centrality.hpp"
#include "difflab/em.hpp"
#include "difflab/errors.hpp"
#include "difflab/influence.hpp"
#include "difflab/io.hpp"
#include "difflab/model_select.hpp"
#include "difflab/simulate.hpp"

#ifndef DIFFLAB_VERSION
#define DIFFLAB_VERSION "0.0.0"
#endif

using namespace difflab;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitEstimation = 4;

// Flags that parse but contradict each other or the chosen model.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Records everything needed to reproduce one command's output.
class Manifest {
 public:
  explicit Manifest(std::string command)
      : command_(std::move(command)), start_(std::chrono::steady_clock::now()) {}

  json& config() { return config_; }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  void add_warnings(std::size_t n) { warnings_ += n; }

  /// Reads a file and remembers its digest.
  std::string read_input(const std::string& role, const std::string& path) {
    std::string text = read_text_file(path);
    inputs_[role] = {{"path", path}, {"sha256", sha256_hex(text)}};
    return text;
  }

  void write(const std::string& out_path) const {
    json m;
    m["command"] = command_;
    m["config"] = config_;
    m["seed"] = seed_ ? json(*seed_) : json(nullptr);
    m["inputs"] = inputs_;
    m["version"] = DIFFLAB_VERSION;
    m["warnings"] = warnings_;
    m["duration_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text_file(out_path + ".manifest.json", m.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::chrono::steady_clock::time_point start_;
  json config_ = json::object();
  json inputs_ = json::object();
  std::optional<std::uint64_t> seed_;
  std::size_t warnings_ = 0;
};

// Parameter flags shared by simulate, influence and rank.
struct ParamFlags {
  std::string model;
  std::string params_file;
  std::optional<double> p, q, r;
  std::string delay = "link";

  void add_to(CLI::App* cmd, bool model_required) {
    auto* m = cmd->add_option("--model", model, "asic or aslt")
                  ->check(CLI::IsMember({"asic", "aslt"}));
    if (model_required) m->required();
    cmd->add_option("--params", params_file, "parameter JSON (replaces --p/--q/--r)");
    cmd->add_option("--p", p, "shared diffusion probability (asic)");
    cmd->add_option("--q", q, "shared weight coefficient (aslt)");
    cmd->add_option("--r", r, "shared delay rate");
    cmd->add_option("--delay", delay, "link, node-no or node-ov")
        ->check(CLI::IsMember({"link", "node-no", "node-ov"}));
  }

  ModelParams resolve(const DirectedGraph& g, Manifest& manifest) const {
    const DelayModel d = parse_delay_model(delay);
    json& cfg = manifest.config();
    cfg["delay"] = delay;
    if (!params_file.empty()) {
      if (p || q || r) throw UsageError("--params cannot be combined with --p, --q or --r");
      ModelParams out = params_from_json(manifest.read_input("params", params_file), g, d);
      if (!model.empty() && parse_model_kind(model) != model_of(out)) {
        throw UsageError("--model " + model + " contradicts the model in " + params_file);
      }
      cfg["model"] = to_string(model_of(out));
      cfg["params"] = params_file;
      return out;
    }
    if (model.empty()) throw UsageError("--model is required without --params");
    if (!r) throw UsageError("--r is required without --params");
    cfg["model"] = model;
    cfg["r"] = *r;
    if (model == "asic") {
      if (q) throw UsageError("--q applies to aslt, not asic");
      if (!p) throw UsageError("--p is required for asic");
      cfg["p"] = *p;
      ModelParams out = AsicParams::shared(*p, *r);
      validate(out, g, d);
      return out;
    }
    if (p) throw UsageError("--p applies to asic, not aslt");
    if (!q) throw UsageError("--q is required for aslt");
    cfg["q"] = *q;
    ModelParams out = AsltParams::shared(*q, *r);
    validate(out, g, d);
    return out;
  }
};

DirectedGraph load_graph(Manifest& manifest, const std::string& path) {
  manifest.config()["graph"] = path;
  return load_edge_list(manifest.read_input("graph", path));
}

// ---- graph -----------------------------------------------------------------

struct GraphOpts {
  std::string kind = "pa";
  std::size_t n = 1000;
  double density = 3;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_graph(const GraphOpts& o) {
  Manifest manifest("graph");
  manifest.set_seed(o.seed);
  manifest.config() = {{"kind", o.kind}, {"n", o.n}, {"density", o.density}, {"out", o.out}};
  const GraphKind kind = o.kind == "er" ? GraphKind::erdos_renyi : GraphKind::preferential_attachment;
  const DirectedGraph g = generate_synthetic(kind, o.n, o.density, o.seed);
  write_text_file(o.out, serialize_edge_list(g));
  manifest.write(o.out);
  return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateOpts {
  std::string graph;
  ParamFlags params;
  std::size_t target_active = 1000;
  std::size_t min_len = 10;
  std::size_t max_attempts = 100000;
  double horizon_margin = 1000.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
  Manifest manifest("simulate");
  manifest.set_seed(o.seed);
  const DirectedGraph g = load_graph(manifest, o.graph);
  const ModelParams params = o.params.resolve(g, manifest);
  if (o.min_len < 1 || o.target_active < o.min_len) {
    throw UsageError("need target-active >= min-len >= 1");
  }
  json& cfg = manifest.config();
  cfg["target_active"] = o.target_active;
  cfg["min_len"] = o.min_len;
  cfg["max_attempts"] = o.max_attempts;
  cfg["horizon_margin"] = o.horizon_margin;
  cfg["out"] = o.out;

  TrainingSetOptions opts;
  opts.target_active = o.target_active;
  opts.min_len = o.min_len;
  opts.max_attempts = o.max_attempts;
  opts.horizon_margin = o.horizon_margin;
  const CascadeSet data =
      generate_training_set(g, params, parse_delay_model(o.params.delay), opts, o.seed);
  write_text_file(o.out, write_cascades_jsonl(data, g));
  manifest.write(o.out);
  return 0;
}

// ---- learn -----------------------------------------------------------------

struct LearnOpts {
  std::string graph, cascades, model, mode = "shared", delay = "link", truth, out;
  double tol = 1e-6;
  int max_iter = 100;
  double init_p = 0.5, init_q = 0.5, init_r = 1.0;
};

// Mean relative error over entries whose true value is non-zero.
double mean_relative_error(const ParamVector& est, const ParamVector& truth, std::size_t items) {
  const std::size_t n = truth.is_shared() && est.is_shared() ? 1 : items;
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (truth[i] == 0.0) continue;
    sum += param_error(est[i], truth[i]);
    ++used;
  }
  return used == 0 ? std::nan("") : sum / static_cast<double>(used);
}

int cmd_learn(const LearnOpts& o) {
  Manifest manifest("learn");
  const DirectedGraph g = load_graph(manifest, o.graph);
  const CascadeSet data = read_cascades_jsonl(manifest.read_input("cascades", o.cascades), g);
  EmConfig cfg;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iter;
  cfg.mode = parse_param_mode(o.mode);
  cfg.delay = parse_delay_model(o.delay);
  cfg.init_p = o.init_p;
  cfg.init_q = o.init_q;
  cfg.init_r = o.init_r;
  manifest.config() = {{"graph", o.graph}, {"cascades", o.cascades}, {"model", o.model},
                       {"mode", o.mode},   {"delay", o.delay},       {"tol", o.tol},
                       {"max_iter", o.max_iter}, {"init_p", o.init_p}, {"init_q", o.init_q},
                       {"init_r", o.init_r}, {"out", o.out}};
  const ModelKind kind = parse_model_kind(o.model);

  std::optional<ModelParams> truth;
  if (!o.truth.empty()) {
    truth = params_from_json(manifest.read_input("truth", o.truth), g, cfg.delay);
    if (model_of(*truth) != kind) throw UsageError("--truth holds a different model");
    manifest.config()["truth"] = o.truth;
  }

  const FitResult res = fit(kind, g, data, cfg);
  const EmTrace& tr = res.trace;
  if (tr.untouched > 0) {
    std::cerr << "warning: " << tr.untouched << " parameters had no evidence and kept their initial value\n";
  }
  manifest.add_warnings(tr.untouched);

  json trace;
  trace["loglik"] = json::array();
  for (double ll : tr.loglik) trace["loglik"].push_back(finite_or_null(ll));
  trace["iterations"] = tr.iterations;
  trace["converged"] = tr.converged;
  trace["clamp_events"] = tr.clamp_events;
  trace["untouched"] = tr.untouched;
  if (truth) {
    const std::size_t m = g.edge_count();
    json err;
    if (kind == ModelKind::asic) {
      const auto& est = std::get<AsicParams>(res.params);
      const auto& tru = std::get<AsicParams>(*truth);
      err["p"] = finite_or_null(mean_relative_error(est.p, tru.p, m));
      err["r"] = finite_or_null(mean_relative_error(est.r, tru.r, m));
    } else {
      const auto& est = std::get<AsltParams>(res.params);
      const auto& tru = std::get<AsltParams>(*truth);
      err["q"] = finite_or_null(mean_relative_error(est.q, tru.q, m));
      err["r"] = finite_or_null(mean_relative_error(est.r, tru.r, m));
    }
    trace["errors"] = err;
  }
  write_text_file(o.out, params_to_json(res.params, g, cfg.delay, tr.iterations, tr.loglik.back()));
  write_text_file(o.out + ".trace.json", trace.dump(2) + "\n");
  manifest.write(o.out);
  return 0;
}

// ---- select ----------------------------------------------------------------

struct SelectOpts {
  std::string graph, cascades, topic_labels, out;
  double tol = 1e-6;
  int max_iter = 100;
  bool cold_start = false;
  int threads = 0;
};

int cmd_select(const SelectOpts& o) {
  Manifest manifest("select");
  const DirectedGraph g = load_graph(manifest, o.graph);
  CascadeSet data = read_cascades_jsonl(manifest.read_input("cascades", o.cascades), g);
  manifest.config() = {{"graph", o.graph},     {"cascades", o.cascades},
                       {"tol", o.tol},         {"max_iter", o.max_iter},
                       {"cold_start", o.cold_start}, {"out", o.out}};
  if (!o.topic_labels.empty()) {
    manifest.config()["topic_labels"] = o.topic_labels;
    std::map<std::string, std::string> labels;
    for (auto& [id, topic] : read_topic_labels(manifest.read_input("topic_labels", o.topic_labels))) {
      labels[id] = topic;
    }
    for (auto& c : data) {
      auto it = labels.find(c.id());
      if (it != labels.end()) c.set_topic(it->second);
    }
  }

  // Topics in order of first appearance.
  std::vector<std::string> order;
  std::map<std::string, CascadeSet> topics;
  for (const auto& c : data) {
    const std::string t = c.topic().empty() ? "default" : c.topic();
    if (!topics.count(t)) order.push_back(t);
    topics[t].push_back(c);
  }

  EmConfig cfg;
  cfg.tolerance = o.tol;
  cfg.max_iterations = o.max_iter;
  ScoreOptions so;
  so.warm_start = !o.cold_start;
  so.threads = o.threads;

  json out = json::array();
  for (const auto& t : order) {
    try {
      SelectionReport rep = select_model(g, topics[t], cfg, so);
      rep.topic = t;
      out.push_back(json::parse(selection_report_json(rep, g)));
    } catch (const InsufficientDataError& e) {
      std::cerr << "warning: topic " << t << " skipped: " << e.what() << "\n";
      manifest.add_warnings(1);
      out.push_back({{"topic", t}, {"skipped", true}, {"reason", e.what()}});
    }
  }
  write_text_file(o.out, out.dump(2) + "\n");
  manifest.write(o.out);
  return 0;
}

// ---- influence / rank ------------------------------------------------------

struct InfluenceOpts {
  std::string graph, method = "percolation", out;
  ParamFlags params;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  int threads = 0;
};

InfluenceTable run_influence(const InfluenceOpts& o, const DirectedGraph& g, Manifest& manifest) {
  const ModelParams params = o.params.resolve(g, manifest);
  json& cfg = manifest.config();
  cfg["method"] = o.method;
  cfg["samples"] = o.samples;
  cfg["out"] = o.out;
  if (o.samples == 0) throw UsageError("--samples must be positive");
  if (o.method == "percolation") return influence_percolation(g, params, o.samples, o.seed, o.threads);
  return influence_direct_mc(g, params, parse_delay_model(o.params.delay), o.samples, o.seed,
                             o.threads);
}

int cmd_influence(const InfluenceOpts& o) {
  Manifest manifest("influence");
  manifest.set_seed(o.seed);
  const DirectedGraph g = load_graph(manifest, o.graph);
  const InfluenceTable table = run_influence(o, g, manifest);
  write_text_file(o.out, influence_csv(table, g));
  manifest.write(o.out);
  return 0;
}

int cmd_rank(const InfluenceOpts& o) {
  Manifest manifest("rank");
  const DirectedGraph g = load_graph(manifest, o.graph);
  RankedList list;
  if (o.method == "percolation" || o.method == "mc") {
    manifest.set_seed(o.seed);
    list = RankedList::from_scores(run_influence(o, g, manifest).sigma);
  } else {
    if (!o.params.params_file.empty() || o.params.p || o.params.q || o.params.r) {
      throw UsageError("centrality methods take no model parameters");
    }
    manifest.config()["method"] = o.method;
    manifest.config()["out"] = o.out;
    list = centrality(g, parse_centrality_metric(o.method));
  }
  write_text_file(o.out, ranking_csv(list, g));
  manifest.write(o.out);
  return 0;
}

// ---- compare-rank ----------------------------------------------------------

struct CompareOpts {
  std::string graph, truth, candidate, out;
  std::size_t k = 200;
};

int cmd_compare_rank(const CompareOpts& o) {
  Manifest manifest("compare-rank");
  const DirectedGraph g = load_graph(manifest, o.graph);
  manifest.config()["truth"] = o.truth;
  manifest.config()["candidate"] = o.candidate;
  manifest.config()["k"] = o.k;
  manifest.config()["out"] = o.out;
  const RankedList truth = read_ranking_csv(manifest.read_input("truth", o.truth), g);
  const RankedList cand = read_ranking_csv(manifest.read_input("candidate", o.candidate), g);
  if (o.k < 1 || o.k > g.node_count()) throw UsageError("--k must lie in [1, node count]");
  write_text_file(o.out, similarity_csv(similarity_curve(truth, cand, o.k)));
  manifest.write(o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous IC/LT diffusion: simulation, learning, model selection, ranking"};
  app.set_version_flag("--version", DIFFLAB_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0: DIFFLAB_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  GraphOpts go;
  auto* graph = app.add_subcommand("graph", "generate a synthetic graph");
  graph->add_option("--kind", go.kind, "pa (preferential attachment) or er (Erdos-Renyi)")
      ->check(CLI::IsMember({"pa", "er"}));
  graph->add_option("--n", go.n, "node count")->required();
  graph->add_option("--density", go.density, "pa: links per new node; er: link probability");
  graph->add_option("--seed", go.seed);
  graph->add_option("-o,--out", go.out)->required();

  SimulateOpts so;
  auto* simulate = app.add_subcommand("simulate", "generate a cascade training set");
  simulate->add_option("--graph", so.graph)->required();
  so.params.add_to(simulate, false);
  simulate->add_option("--target-active", so.target_active, "stop once this many nodes are active");
  simulate->add_option("--min-len", so.min_len, "discard shorter cascades");
  simulate->add_option("--max-attempts", so.max_attempts);
  simulate->add_option("--horizon-margin", so.horizon_margin);
  simulate->add_option("--seed", so.seed);
  simulate->add_option("-o,--out", so.out)->required();

  LearnOpts lo;
  auto* learn = app.add_subcommand("learn", "fit parameters by EM");
  learn->add_option("--graph", lo.graph)->required();
  learn->add_option("--cascades", lo.cascades)->required();
  learn->add_option("--model", lo.model)->required()->check(CLI::IsMember({"asic", "aslt"}));
  learn->add_option("--mode", lo.mode)->check(CLI::IsMember({"shared", "per-link"}));
  learn->add_option("--delay", lo.delay)->check(CLI::IsMember({"link", "node-no", "node-ov"}));
  learn->add_option("--tol", lo.tol);
  learn->add_option("--max-iter", lo.max_iter);
  learn->add_option("--init-p", lo.init_p);
  learn->add_option("--init-q", lo.init_q);
  learn->add_option("--init-r", lo.init_r);
  learn->add_option("--truth", lo.truth, "true parameter JSON; errors go to the trace sidecar");
  learn->add_option("-o,--out", lo.out)->required();

  SelectOpts sel;
  auto* select = app.add_subcommand("select", "choose between AsIC and AsLT per topic");
  select->add_option("--graph", sel.graph)->required();
  select->add_option("--cascades", sel.cascades)->required();
  select->add_option("--topic-labels", sel.topic_labels, "CSV of cascade id,topic");
  select->add_option("--tol", sel.tol);
  select->add_option("--max-iter", sel.max_iter);
  select->add_flag("--cold-start", sel.cold_start, "fit every cutoff from the initial values");
  select->add_option("-o,--out", sel.out)->required();

  InfluenceOpts io;
  auto* influence = app.add_subcommand("influence", "estimate influence degrees");
  influence->add_option("--graph", io.graph)->required();
  io.params.add_to(influence, false);
  influence->add_option("--method", io.method)->check(CLI::IsMember({"percolation", "mc"}));
  influence->add_option("--samples", io.samples);
  influence->add_option("--seed", io.seed);
  influence->add_option("-o,--out", io.out)->required();

  InfluenceOpts ro;
  auto* rank = app.add_subcommand("rank", "rank nodes by influence or centrality");
  rank->add_option("--graph", ro.graph)->required();
  ro.params.add_to(rank, false);
  rank->add_option("--method", ro.method)
      ->required()
      ->check(CLI::IsMember({"percolation", "mc", "outdegree", "closeness", "betweenness", "pagerank"}));
  rank->add_option("--samples", ro.samples);
  rank->add_option("--seed", ro.seed);
  rank->add_option("-o,--out", ro.out)->required();

  CompareOpts co;
  auto* compare = app.add_subcommand("compare-rank", "ranking similarity F(k) for k = 1..K");
  compare->add_option("--graph", co.graph)->required();
  compare->add_option("--truth", co.truth, "ranking or influence CSV")->required();
  compare->add_option("--candidate", co.candidate, "ranking or influence CSV")->required();
  compare->add_option("--k", co.k);
  compare->add_option("-o,--out", co.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  sel.threads = io.threads = ro.threads = threads;

  try {
    if (*graph) return cmd_graph(go);
    if (*simulate) return cmd_simulate(so);
    if (*learn) return cmd_learn(lo);
    if (*select) return cmd_select(sel);
    if (*influence) return cmd_influence(io);
    if (*rank) return cmd_rank(ro);
    if (*compare) return cmd_compare_rank(co);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ProgressError& e) {
    std::cerr << "simulation failed: " << e.what() << "\n";
    return kExitSimulation;
  } catch (const EstimationError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const InsufficientDataError& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kExitEstimation;
  } catch (const Error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
