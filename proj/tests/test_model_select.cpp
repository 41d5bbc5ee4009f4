#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "difflab/errors.hpp"
#include "difflab/likelihood.hpp"
#include "difflab/model_select.hpp"
#include "difflab/simulate.hpp"
#include "support.hpp"

using namespace difflab;
using fixtures::graph_of;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Cascade times_only(std::vector<double> ts) {
  std::vector<Activation> ev;
  for (std::size_t i = 0; i < ts.size(); ++i) ev.push_back({static_cast<NodeId>(i), ts[i]});
  return Cascade(ev, ts.empty() ? 0.0 : ts.back());
}

// One long cascade on a small preferential-attachment graph.
struct Topic {
  DirectedGraph g;
  CascadeSet data;
};

Topic long_topic(const ModelParams& truth, std::uint64_t seed) {
  Topic t{generate_synthetic(GraphKind::preferential_attachment, 200, 3, seed), {}};
  TrainingSetOptions o;
  o.target_active = 25;
  o.min_len = 25;
  t.data = generate_training_set(t.g, truth, DelayModel::link, o, seed + 1);
  return t;
}

EmConfig tight() {
  EmConfig cfg;
  cfg.tolerance = 1e-11;
  cfg.max_iterations = 20000;
  return cfg;
}

}  // namespace

TEST(ObservationPeriods, MedianOfOddCount) {
  const auto p = build_observation_periods({times_only({0, 1, 2, 3, 4})});
  EXPECT_DOUBLE_EQ(p.tau0, 2.0);
  EXPECT_EQ(p.cutoffs, (std::vector<double>{2, 3, 4}));
}

TEST(ObservationPeriods, MedianOfEvenCountAveragesMiddlePair) {
  const auto p = build_observation_periods({times_only({0, 1, 2, 3})});
  EXPECT_DOUBLE_EQ(p.tau0, 1.5);
  EXPECT_EQ(p.cutoffs, (std::vector<double>{2, 3}));
}

TEST(ObservationPeriods, MedianAtMaximumGivesSingleCutoff) {
  const auto p = build_observation_periods({times_only({0, 5, 5})});
  EXPECT_DOUBLE_EQ(p.tau0, 5.0);
  EXPECT_EQ(p.cutoffs, (std::vector<double>{5}));
}

TEST(ObservationPeriods, UnionOfCascades) {
  const auto p = build_observation_periods({times_only({0, 2}), times_only({0, 1, 3})});
  EXPECT_DOUBLE_EQ(p.tau0, 1.0);
  EXPECT_EQ(p.cutoffs, (std::vector<double>{1, 2, 3}));
}

TEST(ObservationPeriods, TooFewEvents) {
  EXPECT_THROW(build_observation_periods({times_only({0})}), InsufficientDataError);
  EXPECT_THROW(build_observation_periods({}), InsufficientDataError);
}

TEST(ObservationPeriods, EveryCutoffPrecedesAHeldOutEvent) {
  Rng rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    CascadeSet data;
    for (std::size_t m = 0, count = 1 + rng.below(3); m < count; ++m) {
      std::vector<double> ts{0.0};
      for (std::size_t k = 0, len = rng.below(8); k < len; ++k) {
        ts.push_back(ts.back() + (rng.below(3) == 0 ? 0.0 : fixtures::uniform_in(rng, 0, 2)));
      }
      data.push_back(times_only(ts));
    }
    std::size_t events = 0;
    for (const auto& c : data) events += c.size();
    if (events < 2) continue;
    const auto p = build_observation_periods(data);
    ASSERT_FALSE(p.cutoffs.empty());
    for (std::size_t i = 0; i < p.count(); ++i) {
      ASSERT_GE(p.cutoffs[i], p.tau0);
      if (i > 0) ASSERT_GT(p.cutoffs[i], p.cutoffs[i - 1]);
      bool held_out = false;
      for (const auto& c : data) {
        for (const auto& a : c.events()) held_out |= a.time == p.cutoffs[i];
      }
      ASSERT_TRUE(held_out);
    }
  }
}

TEST(ResolveChoice, ArgminAndTies) {
  SelectionReport r;
  r.score_asic = 1.0;
  r.score_aslt = 1.5;
  resolve_choice(r);
  EXPECT_EQ(r.chosen, ModelKind::asic);
  EXPECT_DOUBLE_EQ(r.j, 0.5);
  EXPECT_DOUBLE_EQ(r.j_asic_aslt, 0.5);
  EXPECT_FALSE(r.indeterminate);

  r.score_asic = 2.0;
  resolve_choice(r);
  EXPECT_EQ(r.chosen, ModelKind::aslt);
  EXPECT_DOUBLE_EQ(r.j, 0.5);
  EXPECT_DOUBLE_EQ(r.j_asic_aslt, -0.5);

  r.score_asic = r.score_aslt = 0.7;
  resolve_choice(r);
  EXPECT_TRUE(r.indeterminate);
  EXPECT_EQ(r.chosen, ModelKind::asic);
  EXPECT_EQ(r.j, 0.0);

  r.score_asic = r.score_aslt = kInf;
  resolve_choice(r);
  EXPECT_TRUE(r.indeterminate);
  EXPECT_EQ(r.chosen, ModelKind::asic);
  EXPECT_EQ(r.j, 0.0);

  r.score_asic = kInf;
  r.score_aslt = 3.0;
  resolve_choice(r);
  EXPECT_FALSE(r.indeterminate);
  EXPECT_EQ(r.chosen, ModelKind::aslt);
}

TEST(PredictiveScore, MeanOfIndependentlyRecomputedTerms) {
  const auto topic = long_topic(AsicParams::shared(0.2, 1.0), 3);
  const auto periods = build_observation_periods(topic.data);
  for (auto model : {ModelKind::asic, ModelKind::aslt}) {
    const auto s = predictive_score(model, topic.g, topic.data, periods, EmConfig{});
    ASSERT_EQ(s.terms.size(), periods.count());
    double sum = 0.0;
    for (const auto& t : s.terms) {
      ASSERT_FALSE(t.skipped);
      // Held-out event: first activation at or after the cutoff.
      const auto& ev = topic.data[0].events();
      std::size_t k = 0;
      while (ev[k].time < t.cutoff) ++k;
      ASSERT_EQ(t.held_out.node, ev[k].node);
      ASSERT_EQ(t.held_out.time, ev[k].time);
      std::vector<Activation> seen(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(k) + 1);
      const Cascade probe(seen, ev[k].time);
      const double h = model == ModelKind::asic
                           ? h_asic(topic.g, probe, std::get<AsicParams>(t.params), DelayModel::link, ev[k].node)
                           : h_aslt(topic.g, probe, std::get<AsltParams>(t.params), DelayModel::link, ev[k].node);
      ASSERT_NEAR(t.neg_log_h, -std::log(h), 1e-12 * std::max(1.0, std::fabs(std::log(h))));
      sum += -std::log(h);
    }
    EXPECT_NEAR(s.score, sum / static_cast<double>(s.terms.size()), 1e-12);
  }
}

TEST(PredictiveScore, ColdStartMatchesWarmStart) {
  const auto topic = long_topic(AsltParams::shared(0.9, 1.0), 5);
  const auto periods = build_observation_periods(topic.data);
  for (auto model : {ModelKind::asic, ModelKind::aslt}) {
    const auto warm = predictive_score(model, topic.g, topic.data, periods, tight());
    ScoreOptions cold;
    cold.warm_start = false;
    cold.threads = 2;
    const auto fresh = predictive_score(model, topic.g, topic.data, periods, tight(), cold);
    EXPECT_NEAR(warm.score, fresh.score, 1e-6) << to_string(model);
  }
}

TEST(PredictiveScore, FitsDoNotSeePastTheCutoff) {
  const auto topic = long_topic(AsicParams::shared(0.2, 1.0), 7);
  const auto periods = build_observation_periods(topic.data);
  ASSERT_GE(periods.count(), 3u);
  const double pivot = periods.cutoffs[periods.count() / 2];
  // Push every activation after the pivot's held-out event one unit later.
  std::vector<Activation> moved;
  bool held_out_seen = false;
  for (const auto& a : topic.data[0].events()) {
    const bool later = a.time > pivot || (a.time == pivot && held_out_seen);
    if (a.time == pivot) held_out_seen = true;
    moved.push_back({a.node, later ? a.time + 1.0 : a.time});
  }
  const CascadeSet shifted{Cascade(moved, topic.data[0].horizon() + 1.0)};
  for (auto model : {ModelKind::asic, ModelKind::aslt}) {
    const auto a = predictive_score(model, topic.g, topic.data, periods, EmConfig{});
    const auto b = predictive_score(model, topic.g, shifted, periods, EmConfig{});
    for (std::size_t i = 0; i < periods.count() && periods.cutoffs[i] <= pivot; ++i) {
      EXPECT_EQ(a.terms[i].params, b.terms[i].params) << "cutoff " << i;
      EXPECT_EQ(a.terms[i].neg_log_h, b.terms[i].neg_log_h) << "cutoff " << i;
    }
  }
}

TEST(PredictiveScore, UnfittableCutoffIsSkipped) {
  // Cutoff 5 leaves only node 2, which has no children: no evidence at all.
  const auto g = graph_of(3, {{0, 1}});
  const CascadeSet data{Cascade({{2, 0.0}}, 10.0), Cascade({{0, 5.0}, {1, 6.0}}, 10.0)};
  const auto periods = build_observation_periods(data);
  ASSERT_EQ(periods.cutoffs, (std::vector<double>{5, 6}));
  for (auto model : {ModelKind::asic, ModelKind::aslt}) {
    const auto s = predictive_score(model, g, data, periods, EmConfig{});
    EXPECT_TRUE(s.terms[0].skipped);
    EXPECT_FALSE(s.terms[0].skip_reason.empty());
    EXPECT_FALSE(s.terms[1].skipped);
    EXPECT_EQ(s.used, 1u);
    EXPECT_DOUBLE_EQ(s.score, s.terms[1].neg_log_h);
  }
  const auto rep = select_model(g, data, EmConfig{});
  EXPECT_EQ(rep.skipped, 1u);
  EXPECT_EQ(rep.cutoffs.size(), 1u);
}

TEST(PredictiveScore, EveryCutoffUnfittable) {
  const auto g = graph_of(3, {{0, 1}});
  const CascadeSet data{Cascade({{2, 0.0}}, 10.0), Cascade({{2, 4.0}}, 10.0)};
  EXPECT_THROW(select_model(g, data, EmConfig{}), InsufficientDataError);
}

TEST(PredictiveScore, HeldOutTieBreak) {
  // Nodes 1 and 2 both activate at t = 1 in cascade 0, node 0 at t = 1 in cascade 1.
  const auto g = graph_of(4, {{3, 0}, {3, 1}, {3, 2}});
  const CascadeSet data{Cascade({{3, 0.0}, {2, 1.0}, {1, 1.0}}, 2.0),
                        Cascade({{3, 0.0}, {0, 1.0}}, 2.0)};
  const auto periods = build_observation_periods(data);
  const auto s = predictive_score(ModelKind::asic, g, data, periods, EmConfig{});
  ASSERT_FALSE(s.terms.empty());
  EXPECT_DOUBLE_EQ(s.terms[0].cutoff, 1.0);
  EXPECT_EQ(s.terms[0].held_out.cascade, 0u);
  EXPECT_EQ(s.terms[0].held_out.node, 1u);
}

TEST(SelectModel, ReportIsConsistent) {
  for (std::uint64_t seed : {11u, 12u}) {
    const ModelParams truth = seed % 2 == 1 ? ModelParams(AsicParams::shared(0.2, 1.0))
                                            : ModelParams(AsltParams::shared(0.9, 1.0));
    const auto topic = long_topic(truth, seed);
    ScoreOptions opts;
    opts.threads = 2;
    const auto rep = select_model(topic.g, topic.data, EmConfig{}, opts);
    EXPECT_EQ(rep.chosen, rep.score_asic <= rep.score_aslt ? ModelKind::asic : ModelKind::aslt);
    EXPECT_DOUBLE_EQ(rep.j, std::fabs(rep.score_aslt - rep.score_asic));
    double sa = 0.0, sl = 0.0;
    for (const auto& c : rep.cutoffs) {
      sa += -std::log(c.h_asic);
      sl += -std::log(c.h_aslt);
    }
    const double n = static_cast<double>(rep.cutoffs.size());
    EXPECT_NEAR(rep.score_asic, sa / n, 1e-12);
    EXPECT_NEAR(rep.score_aslt, sl / n, 1e-12);
    EXPECT_EQ(rep.tau0, build_observation_periods(topic.data).tau0);

    const auto again = select_model(topic.g, topic.data, EmConfig{});
    EXPECT_EQ(again.score_asic, rep.score_asic);
    EXPECT_EQ(again.score_aslt, rep.score_aslt);
  }
}
