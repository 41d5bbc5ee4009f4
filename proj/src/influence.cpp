#include "difflab/influence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "difflab/errors.hpp"
#include "difflab/kernels.hpp"
#include "difflab/parallel.hpp"
#include "difflab/rng.hpp"
#include "difflab/simulate.hpp"

namespace difflab {

namespace {

// Fixed chunk count so the reduction order never depends on the thread count.
constexpr std::size_t kChunks = 64;
// Target nodes per reachability block; bounds bitset memory on large graphs.
constexpr std::size_t kBlockNodes = 8192;

struct Moments {
  std::vector<double> sum;
  std::vector<double> sumsq;
};

InfluenceTable finish(const std::vector<Moments>& parts, std::size_t n, std::size_t samples,
                      InfluenceMethod method) {
  InfluenceTable t;
  t.samples = samples;
  t.method = method;
  t.sigma.assign(n, 0.0);
  t.stderr_sigma.assign(n, 0.0);
  std::vector<double> sumsq(n, 0.0);
  for (const auto& p : parts) {
    if (p.sum.empty()) continue;
    for (std::size_t v = 0; v < n; ++v) {
      t.sigma[v] += p.sum[v];
      sumsq[v] += p.sumsq[v];
    }
  }
  const double s = static_cast<double>(samples);
  for (std::size_t v = 0; v < n; ++v) {
    const double mean = t.sigma[v] / s;
    t.sigma[v] = mean;
    if (samples > 1) {
      const double var = std::max(0.0, (sumsq[v] - s * mean * mean) / (s - 1.0));
      t.stderr_sigma[v] = std::sqrt(var / s);
    }
  }
  return t;
}

// Reach counts of every node in one live-edge world.
class WorldReach {
 public:
  explicit WorldReach(std::size_t n)
      : n_(n), off_(n + 1), index_(n), low_(n), comp_(n), on_stack_(n) {}

  /// Live edges given as (source, target) pairs; fills reach(v) for all v.
  void compute(const std::vector<std::pair<NodeId, NodeId>>& live, std::vector<std::uint32_t>& reach) {
    build_csr(live);
    tarjan();
    reach.assign(n_, 0);
    std::vector<std::uint32_t> comp_reach(comp_count_, 0);
    const auto& k = kernels::active();
    for (std::size_t lo = 0; lo < n_; lo += kBlockNodes) {
      const std::size_t hi = std::min(n_, lo + kBlockNodes);
      const std::size_t words = (hi - lo + 63) / 64;
      bits_.assign(comp_count_ * words, 0);
      // Components complete sinks-first, so successors are final when read.
      for (std::size_t c = 0; c < comp_count_; ++c) {
        std::uint64_t* mine = bits_.data() + c * words;
        for (std::size_t i = comp_off_[c]; i < comp_off_[c + 1]; ++i) {
          const NodeId u = comp_nodes_[i];
          if (u >= lo && u < hi) mine[(u - lo) / 64] |= 1ULL << ((u - lo) % 64);
          for (std::size_t e = off_[u]; e < off_[u + 1]; ++e) {
            const std::uint32_t d = comp_[adj_[e]];
            if (d != c) k.or_accumulate(words, mine, bits_.data() + d * words);
          }
        }
        std::uint32_t count = 0;
        for (std::size_t w = 0; w < words; ++w) count += std::popcount(mine[w]);
        comp_reach[c] += count;
      }
    }
    for (std::size_t v = 0; v < n_; ++v) reach[v] = comp_reach[comp_[v]];
  }

 private:
  void build_csr(const std::vector<std::pair<NodeId, NodeId>>& live) {
    std::fill(off_.begin(), off_.end(), 0);
    for (const auto& [u, v] : live) ++off_[u + 1];
    for (std::size_t i = 0; i < n_; ++i) off_[i + 1] += off_[i];
    adj_.resize(live.size());
    cursor_.assign(off_.begin(), off_.end() - 1);
    for (const auto& [u, v] : live) adj_[cursor_[u]++] = v;
  }

  void tarjan() {
    std::fill(index_.begin(), index_.end(), -1);
    std::fill(on_stack_.begin(), on_stack_.end(), 0);
    stack_.clear();
    comp_nodes_.clear();
    comp_off_.assign(1, 0);
    comp_count_ = 0;
    int counter = 0;
    for (std::size_t root = 0; root < n_; ++root) {
      if (index_[root] != -1) continue;
      frames_.push_back({static_cast<NodeId>(root), off_[root]});
      index_[root] = low_[root] = counter++;
      stack_.push_back(static_cast<NodeId>(root));
      on_stack_[root] = 1;
      while (!frames_.empty()) {
        auto& f = frames_.back();
        const NodeId v = f.node;
        if (f.next < off_[v + 1]) {
          const NodeId w = adj_[f.next++];
          if (index_[w] == -1) {
            index_[w] = low_[w] = counter++;
            stack_.push_back(w);
            on_stack_[w] = 1;
            frames_.push_back({w, off_[w]});
          } else if (on_stack_[w]) {
            low_[v] = std::min(low_[v], index_[w]);
          }
          continue;
        }
        frames_.pop_back();
        if (low_[v] == index_[v]) {
          NodeId w;
          do {
            w = stack_.back();
            stack_.pop_back();
            on_stack_[w] = 0;
            comp_[w] = static_cast<std::uint32_t>(comp_count_);
            comp_nodes_.push_back(w);
          } while (w != v);
          comp_off_.push_back(static_cast<std::uint32_t>(comp_nodes_.size()));
          ++comp_count_;
        }
        if (!frames_.empty()) {
          const NodeId parent = frames_.back().node;
          low_[parent] = std::min(low_[parent], low_[v]);
        }
      }
    }
  }

  struct Frame {
    NodeId node;
    std::uint32_t next;
  };

  std::size_t n_;
  std::vector<std::uint32_t> off_;
  std::vector<std::uint32_t> cursor_;
  std::vector<NodeId> adj_;
  std::vector<int> index_;
  std::vector<int> low_;
  std::vector<std::uint32_t> comp_;
  std::vector<std::uint8_t> on_stack_;
  std::vector<NodeId> stack_;
  std::vector<Frame> frames_;
  std::vector<NodeId> comp_nodes_;
  std::vector<std::uint32_t> comp_off_;
  std::size_t comp_count_ = 0;
  std::vector<std::uint64_t> bits_;
};

void sample_live_edges(const DirectedGraph& g, const ModelParams& params,
                       const std::vector<double>& coef, Rng& rng,
                       std::vector<std::pair<NodeId, NodeId>>& live) {
  live.clear();
  if (model_of(params) == ModelKind::asic) {
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
      if (rng.bernoulli(coef[e])) live.emplace_back(g.edge_source(e), g.edge_target(e));
    }
    return;
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    auto in = g.in_edges(v);
    if (in.empty()) continue;
    const double u = rng.uniform();
    double cum = 0.0;
    for (EdgeId e : in) {
      cum += coef[e];
      if (u < cum) {
        live.emplace_back(g.edge_source(e), v);
        break;
      }
    }
  }
}

}  // namespace

InfluenceTable influence_percolation(const DirectedGraph& g, const ModelParams& params,
                                     std::size_t samples, std::uint64_t seed, int threads) {
  if (samples < 1) throw ValidationError("samples must be at least 1");
  validate(params, g, DelayModel::link);
  const std::size_t n = g.node_count();
  std::vector<double> coef(g.edge_count());
  for (EdgeId e = 0; e < g.edge_count(); ++e) {
    coef[e] = std::visit(
        [&](const auto& p) {
          if constexpr (std::is_same_v<std::decay_t<decltype(p)>, AsicParams>) {
            return p.prob(e);
          } else {
            return p.weight(g, e);
          }
        },
        params);
  }

  const std::size_t chunks = std::min(kChunks, samples);
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, resolve_threads(threads), [&](std::size_t c) {
    const std::size_t begin = samples * c / chunks;
    const std::size_t end = samples * (c + 1) / chunks;
    Moments& m = parts[c];
    m.sum.assign(n, 0.0);
    m.sumsq.assign(n, 0.0);
    WorldReach world(n);
    std::vector<std::pair<NodeId, NodeId>> live;
    std::vector<std::uint32_t> reach;
    for (std::size_t s = begin; s < end; ++s) {
      Rng rng(derive_seed(seed, "percolation", s));
      sample_live_edges(g, params, coef, rng, live);
      world.compute(live, reach);
      for (std::size_t v = 0; v < n; ++v) {
        const double x = reach[v];
        m.sum[v] += x;
        m.sumsq[v] += x * x;
      }
    }
  });
  return finish(parts, n, samples, InfluenceMethod::percolation);
}

InfluenceTable influence_direct_mc(const DirectedGraph& g, const ModelParams& params,
                                   DelayModel delay, std::size_t samples, std::uint64_t seed,
                                   int threads) {
  if (samples < 1) throw ValidationError("samples must be at least 1");
  validate(params, g, delay);
  const std::size_t n = g.node_count();
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  std::vector<Moments> parts(chunks);
  parallel_for(chunks, resolve_threads(threads), [&](std::size_t c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    Moments& m = parts[c];
    m.sum.assign(n, 0.0);
    m.sumsq.assign(n, 0.0);
    CascadeSimulator sim(g, params, delay);
    for (std::size_t v = begin; v < end; ++v) {
      const NodeId s0 = static_cast<NodeId>(v);
      for (std::size_t s = 0; s < samples; ++s) {
        const double x = static_cast<double>(
            sim.run({&s0, 1}, derive_seed(seed, "direct-mc", v, s)).size());
        m.sum[v] += x;
        m.sumsq[v] += x * x;
      }
    }
  });
  return finish(parts, n, samples, InfluenceMethod::direct_mc);
}

CumulativeInfluence::CumulativeInfluence(const InfluenceTable& table)
    : CumulativeInfluence(table.sigma) {}

CumulativeInfluence::CumulativeInfluence(std::vector<double> sigma) : sorted_(std::move(sigma)) {
  std::sort(sorted_.begin(), sorted_.end());
}

double CumulativeInfluence::operator()(double x) const noexcept {
  if (sorted_.empty()) return 0.0;
  const auto it = std::lower_bound(sorted_.begin(), sorted_.end(), x);
  return static_cast<double>(sorted_.end() - it) / static_cast<double>(sorted_.size());
}

double CumulativeInfluence::quantile(double q) const {
  if (sorted_.empty()) throw DomainError("quantile of an empty table");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  const auto n = sorted_.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  return sorted_[rank - 1];
}

RankedList RankedList::from_scores(std::vector<double> scores) {
  RankedList out;
  out.score = std::move(scores);
  out.order.resize(out.score.size());
  std::iota(out.order.begin(), out.order.end(), NodeId{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](NodeId a, NodeId b) { return out.score[a] > out.score[b]; });
  return out;
}

double ranking_similarity(const RankedList& truth, const RankedList& candidate, std::size_t k) {
  if (k < 1 || k > truth.order.size() || k > candidate.order.size()) {
    throw DomainError("k must lie in [1, list size]");
  }
  std::vector<NodeId> a(truth.order.begin(), truth.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::vector<NodeId> b(candidate.order.begin(),
                        candidate.order.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<NodeId> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(k);
}

std::vector<double> similarity_curve(const RankedList& truth, const RankedList& candidate,
                                     std::size_t k_max) {
  std::vector<double> out;
  out.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) out.push_back(ranking_similarity(truth, candidate, k));
  return out;
}

}  // namespace difflab
