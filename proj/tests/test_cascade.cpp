#include <gtest/gtest.h>

#include "difflab/cascade.hpp"
#include "difflab/errors.hpp"
#include "support.hpp"

using namespace difflab;
using fixtures::graph_of;

TEST(Cascade, ValidatesEvents) {
  EXPECT_THROW(Cascade({{0, 1.0}, {1, 0.5}}, 2.0), ValidationError);
  EXPECT_THROW(Cascade({{0, 0.0}, {0, 0.5}}, 2.0), ValidationError);
  EXPECT_THROW(Cascade({{0, 0.0}, {1, 3.0}}, 2.0), ValidationError);
  EXPECT_NO_THROW(Cascade({{0, 0.0}, {1, 0.0}, {2, 1.0}}, 1.0));
}

TEST(Cascade, TruncationUsesCutoffAsHorizon) {
  const Cascade c({{0, 0.0}, {1, 1.0}, {2, 2.0}}, 10.0, "x");
  const Cascade t = c.truncated(2.0);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_DOUBLE_EQ(t.horizon(), 2.0);
  EXPECT_EQ(t.id(), "x");
  EXPECT_EQ(c.truncated(0.0).size(), 0u);
}

TEST(Cascade, IndexReportsTimes) {
  const auto g = graph_of(3, {{0, 1}});
  const Cascade c({{1, 0.0}, {0, 2.5}}, 3.0);
  const CascadeIndex idx(c, g);
  EXPECT_TRUE(idx.active(0));
  EXPECT_DOUBLE_EQ(idx.time(0), 2.5);
  EXPECT_FALSE(idx.active(2));
  EXPECT_DOUBLE_EQ(idx.initial_time(), 0.0);
}

TEST(EffectiveParents, StrictTimeFilter) {
  // parents 0 (t=1) and 1 (t=7) of node 2 (t=5)
  const auto g = graph_of(3, {{0, 2}, {1, 2}});
  const Cascade c({{0, 1.0}, {2, 5.0}, {1, 7.0}}, 10.0);
  EXPECT_EQ(effective_parents(g, c, 2), std::vector<NodeId>{0});
}

TEST(EffectiveParents, FrontierNodeUsesActiveParents) {
  const auto g = graph_of(3, {{0, 2}, {1, 2}});
  const Cascade c({{0, 0.0}}, 1.0);
  EXPECT_EQ(effective_parents(g, c, 2), std::vector<NodeId>{0});
}

TEST(EffectiveParents, InitialNodeHasNone) {
  const auto g = graph_of(2, {{0, 1}, {1, 0}});
  const Cascade c({{0, 0.0}, {1, 0.0}}, 1.0);
  EXPECT_TRUE(effective_parents(g, c, 0).empty());
  EXPECT_TRUE(effective_parents(g, c, 1).empty());
}

TEST(EffectiveParents, NodeOutsideCascadeAndFrontier) {
  const auto g = graph_of(3, {{0, 1}});
  const Cascade c({{0, 0.0}}, 1.0);
  EXPECT_THROW(effective_parents(g, c, 2), DomainError);
}

TEST(Frontier, Examples) {
  const auto chain = graph_of(3, {{0, 1}, {1, 2}});
  EXPECT_TRUE(frontier(chain, Cascade({}, 0.0)).empty());
  EXPECT_EQ(frontier(chain, Cascade({{0, 0.0}}, 1.0)), std::vector<NodeId>{1});
  EXPECT_TRUE(frontier(chain, Cascade({{0, 0.0}, {1, 1.0}, {2, 2.0}}, 3.0)).empty());
}

TEST(Cascade, NodeOutsideGraph) {
  const auto g = graph_of(2, {{0, 1}});
  EXPECT_THROW(check_cascade_nodes(g, Cascade({{5, 0.0}}, 1.0)), ValidationError);
  EXPECT_THROW(CascadeIndex(Cascade({{5, 0.0}}, 1.0), g), ValidationError);
}
