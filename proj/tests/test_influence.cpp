#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "difflab/errors.hpp"
#include "difflab/influence.hpp"
#include "support.hpp"

using namespace difflab;
using fixtures::graph_of;

namespace {

// Reachable-set size from s over the live edges.
std::size_t reach(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& live, NodeId s) {
  std::vector<bool> seen(n, false);
  std::vector<NodeId> stack{s};
  seen[s] = true;
  std::size_t count = 0;
  while (!stack.empty()) {
    const NodeId u = stack.back();
    stack.pop_back();
    ++count;
    for (auto [a, b] : live) {
      if (a == u && !seen[b]) {
        seen[b] = true;
        stack.push_back(b);
      }
    }
  }
  return count;
}

// Exact sigma by enumerating every live-edge world.
std::vector<double> exact_sigma_asic(const DirectedGraph& g, const AsicParams& p) {
  const std::size_t n = g.node_count(), m = g.edge_count();
  std::vector<double> sigma(n, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    double prob = 1.0;
    std::vector<std::pair<NodeId, NodeId>> live;
    for (EdgeId e = 0; e < m; ++e) {
      const bool on = (mask >> e) & 1u;
      prob *= on ? p.prob(e) : 1.0 - p.prob(e);
      if (on) live.emplace_back(g.edge_source(e), g.edge_target(e));
    }
    for (NodeId v = 0; v < n; ++v) sigma[v] += prob * static_cast<double>(reach(n, live, v));
  }
  return sigma;
}

std::vector<double> exact_sigma_aslt(const DirectedGraph& g, const AsltParams& p) {
  const std::size_t n = g.node_count();
  std::vector<double> sigma(n, 0.0);
  std::vector<std::pair<NodeId, NodeId>> live;
  std::function<void(NodeId, double)> pick = [&](NodeId v, double prob) {
    if (v == n) {
      for (NodeId s = 0; s < n; ++s) sigma[s] += prob * static_cast<double>(reach(n, live, s));
      return;
    }
    pick(v + 1, prob * p.slack(g, v));
    for (EdgeId e : g.in_edges(v)) {
      live.emplace_back(g.edge_source(e), v);
      pick(v + 1, prob * p.weight(g, e));
      live.pop_back();
    }
  };
  pick(0, 1.0);
  return sigma;
}

DirectedGraph small_graph(Rng& rng) {
  for (;;) {
    const auto g = fixtures::random_graph(rng, 2 + rng.below(4), 0.4);
    if (g.edge_count() >= 1 && g.edge_count() <= 10) return g;
  }
}

}  // namespace

TEST(Percolation, SingleLinkExamples) {
  const auto g = graph_of(2, {{0, 1}});
  const auto ic = influence_percolation(g, AsicParams::shared(0.5, 1.0), 10000, 3);
  EXPECT_NEAR(ic.sigma[0], 1.5, 3 * ic.stderr_sigma[0]);
  EXPECT_EQ(ic.sigma[1], 1.0);
  EXPECT_EQ(ic.samples, 10000u);
  const auto lt = influence_percolation(g, AsltParams::per_link({0.3}, {1.0}), 10000, 3);
  EXPECT_NEAR(lt.sigma[0], 1.3, 3 * lt.stderr_sigma[0]);
}

TEST(Influence, ZeroProbabilityIsExactlyOne) {
  const auto g = generate_synthetic(GraphKind::preferential_attachment, 100, 2, 1);
  const auto perc = influence_percolation(g, AsicParams::shared(0.0, 1.0), 200, 1);
  const auto mc = influence_direct_mc(g, AsicParams::shared(0.0, 1.0), DelayModel::link, 20, 1);
  for (NodeId v = 0; v < 100; ++v) {
    ASSERT_EQ(perc.sigma[v], 1.0);
    ASSERT_EQ(perc.stderr_sigma[v], 0.0);
    ASSERT_EQ(mc.sigma[v], 1.0);
  }
}

TEST(Influence, RejectsInvalidInput) {
  const auto g = graph_of(2, {{0, 1}});
  EXPECT_THROW(influence_percolation(g, AsicParams::shared(0.5, 1.0), 0, 1), ValidationError);
  EXPECT_THROW(influence_percolation(g, AsicParams::shared(1.5, 1.0), 10, 1), ValidationError);
  EXPECT_THROW(influence_direct_mc(g, AsicParams::per_link({0.5, 0.5}, {1.0}), DelayModel::link, 10, 1),
               ValidationError);
}

TEST(InfluenceProperty, PercolationMatchesEnumeration) {
  Rng rng(61);
  int checked = 0, outside = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const auto g = small_graph(rng);
    const bool ic = trial % 2 == 0;
    const ModelParams params = ic ? ModelParams(fixtures::random_asic(rng, g, ParamMode::per_link))
                                  : ModelParams(fixtures::random_aslt(rng, g, ParamMode::per_link));
    const auto exact = ic ? exact_sigma_asic(g, std::get<AsicParams>(params))
                          : exact_sigma_aslt(g, std::get<AsltParams>(params));
    const auto est = influence_percolation(g, params, 20000, rng.next());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      ASSERT_GE(est.sigma[v], 1.0);
      ASSERT_LE(est.sigma[v], static_cast<double>(g.node_count()));
      ++checked;
      if (std::fabs(est.sigma[v] - exact[v]) > 3 * est.stderr_sigma[v] + 1e-12) ++outside;
      ASSERT_LE(std::fabs(est.sigma[v] - exact[v]), 5 * est.stderr_sigma[v] + 1e-12)
          << "trial " << trial << " node " << v;
    }
  }
  // About 0.3% of nodes fall outside 3 SE by chance.
  EXPECT_LE(outside, std::max(2, checked / 20));
}

TEST(InfluenceProperty, DirectSimulationMatchesEnumeration) {
  Rng rng(62);
  for (int trial = 0; trial < 6; ++trial) {
    const auto g = small_graph(rng);
    const bool ic = trial % 2 == 0;
    const ModelParams params = ic ? ModelParams(fixtures::random_asic(rng, g, ParamMode::per_link))
                                  : ModelParams(fixtures::random_aslt(rng, g, ParamMode::per_link));
    const auto exact = ic ? exact_sigma_asic(g, std::get<AsicParams>(params))
                          : exact_sigma_aslt(g, std::get<AsltParams>(params));
    const auto est = influence_direct_mc(g, params, DelayModel::link, 5000, rng.next());
    for (NodeId v = 0; v < g.node_count(); ++v) {
      ASSERT_LE(std::fabs(est.sigma[v] - exact[v]), 5 * est.stderr_sigma[v] + 1e-12)
          << "trial " << trial << " node " << v;
    }
  }
}

TEST(InfluenceProperty, IndependentOfThreadCount) {
  const auto g = generate_synthetic(GraphKind::preferential_attachment, 300, 2, 5);
  const auto params = AsicParams::shared(0.2, 1.0);
  const auto one = influence_percolation(g, params, 500, 9, 1);
  const auto three = influence_percolation(g, params, 500, 9, 3);
  EXPECT_EQ(one.sigma, three.sigma);
  EXPECT_EQ(one.stderr_sigma, three.stderr_sigma);
  const auto mc1 = influence_direct_mc(g, params, DelayModel::link, 20, 9, 1);
  const auto mc3 = influence_direct_mc(g, params, DelayModel::link, 20, 9, 3);
  EXPECT_EQ(mc1.sigma, mc3.sigma);
}

TEST(InfluenceProperty, PercolationIgnoresDelayRate) {
  const auto g = generate_synthetic(GraphKind::preferential_attachment, 200, 2, 6);
  EXPECT_EQ(influence_percolation(g, AsicParams::shared(0.2, 1.0), 300, 4).sigma,
            influence_percolation(g, AsicParams::shared(0.2, 10.0), 300, 4).sigma);
  EXPECT_EQ(influence_percolation(g, AsltParams::shared(0.8, 1.0), 300, 4).sigma,
            influence_percolation(g, AsltParams::shared(0.8, 10.0), 300, 4).sigma);
}

TEST(InfluenceProperty, DirectSimulationInvariantToRateScaling) {
  const auto g = generate_synthetic(GraphKind::preferential_attachment, 40, 2, 7);
  const auto slow = influence_direct_mc(g, AsicParams::shared(0.3, 1.0), DelayModel::link, 3000, 8);
  const auto fast = influence_direct_mc(g, AsicParams::shared(0.3, 10.0), DelayModel::link, 3000, 9);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const double se = std::hypot(slow.stderr_sigma[v], fast.stderr_sigma[v]);
    ASSERT_LE(std::fabs(slow.sigma[v] - fast.sigma[v]), 5 * se + 1e-12) << "node " << v;
  }
}

TEST(InfluenceProperty, MonotoneInProbabilityUnderCommonRandomNumbers) {
  const auto g = generate_synthetic(GraphKind::preferential_attachment, 300, 3, 8);
  std::vector<double> previous(g.node_count(), 1.0);
  for (double p : {0.05, 0.1, 0.2}) {
    const auto t = influence_percolation(g, AsicParams::shared(p, 1.0), 300, 77);
    for (NodeId v = 0; v < g.node_count(); ++v) ASSERT_GE(t.sigma[v], previous[v]);
    previous = t.sigma;
  }
}

TEST(CumulativeInfluence, Examples) {
  const CumulativeInfluence f(std::vector<double>{1, 2, 3});
  EXPECT_DOUBLE_EQ(f(2.0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(f(0.0), 1.0);
  EXPECT_DOUBLE_EQ(f(4.0), 0.0);
  EXPECT_DOUBLE_EQ(f(2.5), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(f.quantile(0.0), 1.0);
  EXPECT_DOUBLE_EQ(f.quantile(1.0), 3.0);
}

TEST(CumulativeInfluence, NonIncreasing) {
  Rng rng(63);
  std::vector<double> sigma(50);
  for (auto& s : sigma) s = fixtures::uniform_in(rng, 1, 20);
  const CumulativeInfluence f(sigma);
  double last = 1.0;
  for (double x = 0; x <= 21; x += 0.25) {
    ASSERT_LE(f(x), last);
    last = f(x);
  }
  EXPECT_EQ(last, 0.0);
}

TEST(RankedList, OrderAndTieBreak) {
  const auto r = RankedList::from_scores({2.0, 5.0, 2.0, 7.0});
  EXPECT_EQ(r.order, (std::vector<NodeId>{3, 1, 0, 2}));
}

TEST(RankingSimilarity, Examples) {
  // a=0, b=1, c=2, d=3
  const auto truth = RankedList::from_scores({9, 8, 7, 1});
  const auto cand = RankedList::from_scores({9, 1, 8, 7});
  EXPECT_DOUBLE_EQ(ranking_similarity(truth, cand, 3), 2.0 / 3.0);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(ranking_similarity(truth, truth, k), 1.0);
  const auto reversed = RankedList::from_scores({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(ranking_similarity(truth, reversed, 2), 0.0);
  EXPECT_THROW(ranking_similarity(truth, cand, 0), DomainError);
  EXPECT_THROW(ranking_similarity(truth, cand, 5), DomainError);
  const auto curve = similarity_curve(truth, cand, 4);
  ASSERT_EQ(curve.size(), 4u);
  EXPECT_DOUBLE_EQ(curve[2], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(curve[3], 1.0);
}
