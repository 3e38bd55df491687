#include <gtest/gtest.h>

#include "graphs.hpp"
#include "ias/errors.hpp"
#include "ias/random_graphs.hpp"
#include "reference.hpp"

using namespace ias;
using ias::testing::figure_left;
using ias::testing::make_dag;

TEST(Dag, RejectsCyclesSelfLoopsAndDuplicates) {
  EXPECT_THROW(make_dag(2, {{"X1", "X2"}, {"X2", "X1"}}), ArgumentError);
  EXPECT_THROW(make_dag(2, {{"X1", "X1"}}), ArgumentError);
  EXPECT_THROW(make_dag(2, {{"X1", "X2"}, {"X1", "X2"}}), ArgumentError);
  EXPECT_THROW(make_dag(2, {{"X1", "E"}, {"E", "Y"}}), ArgumentError);  // exogenous E has no parents
  EXPECT_THROW(Dag::from_edges(2, std::vector<Edge>{{NodeId{0}, NodeId{7}}}), ArgumentError);
}

TEST(Dag, NonExogenousNeedsEnvironmentAncestorOfResponse) {
  EXPECT_NO_THROW(make_dag(2, {{"X1", "E"}, {"E", "X2"}, {"X2", "Y"}}, EnvMode::NonExogenous));
  EXPECT_THROW(make_dag(2, {{"X1", "E"}, {"X2", "Y"}}, EnvMode::NonExogenous), ArgumentError);
}

TEST(Dag, TopologicalOrderRespectsEdges) {
  const Dag g = figure_left();
  std::vector<int> pos(g.node_count());
  const auto order = g.topological_order();
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<int>(i);
  for (const Edge& e : g.edges()) EXPECT_LT(pos[e.parent.index], pos[e.child.index]);
  EXPECT_EQ(g.name(g.response()), "Y");
  EXPECT_EQ(g.name(NodeId{3}), "X3");
}

TEST(Dag, Relatives) {
  const Dag g = figure_left();
  EXPECT_EQ(relatives(g, g.response(), Relation::Parents).predictors(4), (VarSet{3}));
  EXPECT_EQ(relatives(g, g.response(), Relation::Children).predictors(4), (VarSet{4}));
  EXPECT_EQ(relatives(g, g.response(), Relation::Ancestors).predictors(4), (VarSet{1, 2, 3}));
  EXPECT_TRUE(relatives(g, g.response(), Relation::Ancestors).contains(g.env()));
  EXPECT_EQ(relatives(g, g.env(), Relation::Descendants).predictors(4), (VarSet{1, 2, 3, 4}));
}

TEST(Dag, FingerprintIgnoresEdgeOrder) {
  const Dag a = make_dag(2, {{"E", "X1"}, {"X1", "Y"}, {"X2", "Y"}});
  const Dag b = make_dag(2, {{"X2", "Y"}, {"X1", "Y"}, {"E", "X1"}});
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_NE(a.fingerprint(), make_dag(2, {{"E", "X1"}, {"X1", "Y"}}).fingerprint());
}

TEST(DSeparation, FigureExamples) {
  const Dag g = figure_left();
  EXPECT_TRUE(d_separated(g, g.env(), g.response(), VarSet{3}));
  EXPECT_FALSE(d_separated(g, g.env(), g.response(), VarSet{3, 4}));  // conditioning on a child of Y
  EXPECT_FALSE(d_separated(g, g.env(), g.response(), VarSet{}));
  EXPECT_TRUE(d_separated(g, g.env(), g.response(), VarSet{1, 2}));
  EXPECT_THROW(d_separated(g, g.env(), g.env(), VarSet{}), ArgumentError);
}

TEST(DSeparation, AgreesWithPathEnumerationOnRandomGraphs) {
  Rng rng(101);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    GraphSamplerConfig cfg;
    cfg.d = 3 + trial % 4;
    cfg.density = Density::explicit_p(0.3 + 0.1 * (trial % 5));
    cfg.n_interventions = InterventionCount::uniform(1, cfg.d);
    const Dag g = sample_dag(cfg, rng);
    DSeparation ds(g);
    const int n = static_cast<int>(g.node_count());
    for (std::uint64_t mask = 0; mask < (1ULL << g.d()); ++mask) {
      const VarSet s = VarSet::from_mask(mask);
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          if ((a >= 1 && a <= g.d() && s.contains(a)) || (b >= 1 && b <= g.d() && s.contains(b))) continue;
          const NodeId na{static_cast<std::uint32_t>(a)}, nb{static_cast<std::uint32_t>(b)};
          ASSERT_EQ(ds.separated(na, nb, s), ref::d_separated_paths(g, a, b, s))
              << "graph " << trial << " a=" << a << " b=" << b << " s=" << s.to_string();
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 10000);
}

TEST(MoralGraph, MarriesCoParentsOnTheAncestralSet) {
  const Dag g = figure_left();
  const MoralGraph m = moral_ancestral_graph(g, g.env(), g.response());
  EXPECT_EQ(m.vertex(NodeId{4}), -1);  // X4 is not an ancestor of E or Y
  const int x1 = m.vertex(NodeId{1});
  const int x2 = m.vertex(NodeId{2});
  ASSERT_GE(x1, 0);
  ASSERT_GE(x2, 0);
  EXPECT_TRUE(m.graph.adjacent(x1, x2));
}

TEST(MoralGraph, SeparationMatchesDSeparation) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    GraphSamplerConfig cfg;
    cfg.d = 5;
    cfg.density = Density::explicit_p(0.5);
    cfg.n_interventions = InterventionCount::uniform(1, 3);
    const Dag g = sample_dag(cfg, rng);
    for (std::uint64_t mask = 0; mask < 32; ++mask) {
      const VarSet s = VarSet::from_mask(mask);
      const MoralGraph m = moral_ancestral_graph(g, g.env(), g.response(), s);
      std::vector<bool> removed(static_cast<std::size_t>(m.graph.vertex_count()), false);
      s.for_each([&](int k) { removed[static_cast<std::size_t>(m.vertex(NodeId{static_cast<std::uint32_t>(k)}))] = true; });
      EXPECT_EQ(m.graph.separated(m.vertex(g.env()), m.vertex(g.response()), removed),
                d_separated(g, g.env(), g.response(), s));
    }
  }
}
