#include <gtest/gtest.h>

#include <set>

#include "graphs.hpp"
#include "ias/errors.hpp"
#include "ias/estimator.hpp"
#include "ias/oracle.hpp"
#include "ias/random_graphs.hpp"

using namespace ias;

namespace {

PValueFn accept_only(std::vector<VarSet> sets, std::vector<VarSet>* log = nullptr) {
  return [sets = std::move(sets), log](const VarSet& s) {
    if (log) log->push_back(s);
    for (const auto& a : sets) {
      if (a == s) return 1.0;
    }
    return 0.0;
  };
}

PValueFn oracle_p(const Dag& g) {
  return [&g](const VarSet& s) { return oracle_invariant(g, s) ? 1.0 : 0.0; };
}

}  // namespace

TEST(IasSearch, EmptySetNotRejectedStopsImmediately) {
  const auto r = ias_search([](const VarSet&) { return 0.5; }, 5, DecisionConfig{});
  EXPECT_TRUE(r.s_hat.empty());
  EXPECT_EQ(r.tested_count, 1u);
  EXPECT_FALSE(r.empty_set_rejected);
}

TEST(IasSearch, SkipsSupersetsOfAcceptedSets) {
  std::vector<VarSet> log;
  const auto r = ias_search(accept_only({{1}, {2}}, &log), 3, DecisionConfig{});
  EXPECT_EQ(r.s_hat, (VarSet{1, 2}));
  EXPECT_EQ(r.accepted_family, (std::vector<VarSet>{{1}, {2}}));
  // Tested: {}, {1}, {2}, {3}, {2,3}? no: {1,3}, {1,2}, {1,2,3} and {2,3} contain 1 or 2.
  const std::vector<VarSet> tested{{}, {1}, {2}, {3}};
  EXPECT_EQ(log, tested);
  EXPECT_EQ(r.skipped_count, 4u);
  EXPECT_EQ(r.tested_count, 4u);
}

TEST(IasSearch, StopsOnceEveryPredictorIsCovered) {
  std::vector<VarSet> log;
  const auto r = ias_search(accept_only({{1}, {2}, {3}}, &log), 3, DecisionConfig{});
  EXPECT_TRUE(r.stopped_early);
  EXPECT_EQ(log.size(), 4u);
}

TEST(IasSearch, AcceptedFamilyIsAnAntichainWhoseUnionIsTheOutput) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::uint64_t, double> table;
    const auto p = [&](const VarSet& s) {
      std::uint64_t key = 0;
      s.for_each([&](int k) { key |= 1ULL << k; });
      auto it = table.find(key);
      if (it == table.end()) it = table.emplace(key, s.empty() ? 0.0 : rng.uniform()).first;
      return it->second;
    };
    DecisionConfig c;
    c.correction = CorrectionKind::Explicit;
    c.explicit_correction = 1.0;
    const auto r = ias_search(p, 5, c);
    VarSet u;
    for (const auto& a : r.accepted_family) {
      u |= a;
      for (const auto& b : r.accepted_family) {
        if (!(a == b)) EXPECT_FALSE(a.is_subset_of(b));
      }
    }
    EXPECT_EQ(u, r.s_hat);
  }
}

TEST(IasSearch, FailedTestsCountAsRejections) {
  const auto p = [](const VarSet& s) -> double {
    if (s == VarSet{1}) throw NumericalError("singular design for S = {1}");
    return s.empty() ? 0.0 : 1.0;
  };
  const auto r = ias_search(p, 2, DecisionConfig{});
  ASSERT_EQ(r.failures.size(), 1u);
  EXPECT_EQ(r.failures[0].set, VarSet{1});
  EXPECT_EQ(r.s_hat, VarSet{2});
  const auto j = r.to_json();
  EXPECT_EQ(j["failures"].size(), 1u);
  EXPECT_EQ(j["config"]["correction_factor"], 3.0);
}

TEST(IasSearch, Alpha1AppliesToTheLargestSize) {
  // d = 3, m = 2: singletons face alpha / C(2) = 0.05 / 7; pairs face the same
  // level unless alpha1 is set.
  const auto p = [](const VarSet& s) { return s.empty() ? 0.0 : (s.size() == 2 ? 0.03 : 0.005); };
  DecisionConfig c;
  c.m = 2;
  const auto r = ias_search(p, 3, c);
  EXPECT_EQ(r.accepted_family, (std::vector<VarSet>{{1, 2}, {1, 3}}));
  EXPECT_TRUE(r.stopped_early);
  c.alpha1 = 0.06;
  EXPECT_TRUE(ias_search(p, 3, c).s_hat.empty());
  c.alpha1 = 0.02;
  EXPECT_THROW(ias_search(p, 3, c), ArgumentError);
}

TEST(IasSearch, OracleDecisionsReproduceTheOracleUnion) {
  Rng rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    GraphSamplerConfig cfg;
    cfg.d = 3 + trial % 5;
    cfg.density = trial % 2 ? Density::dense() : Density::sparse();
    cfg.n_interventions = InterventionCount::uniform(1, cfg.d);
    const Dag g = sample_dag(cfg, rng);
    for (int m : {1, 2, cfg.d}) {
      DecisionConfig c;
      c.m = m;
      EXPECT_EQ(ias_search(oracle_p(g), g.d(), c).s_hat, oracle_s_as(g, m)) << "trial " << trial << " m " << m;
    }
  }
}

TEST(IcpSearch, IntersectionConventions) {
  EXPECT_EQ(icp_search(accept_only({{1, 2}, {2, 3}}), VarSet{1, 2, 3}, 0.05), VarSet{2});
  EXPECT_TRUE(icp_search(accept_only({}), VarSet{1, 2, 3}, 0.05).empty());
  EXPECT_THROW(icp_search(accept_only({}), VarSet::range(1, 26), 0.05), ResourceError);
}

TEST(IcpSearch, OracleDecisionsReproduceClosedForm) {
  Rng rng(22);
  for (int trial = 0; trial < 200; ++trial) {
    GraphSamplerConfig cfg;
    cfg.d = 3 + trial % 5;
    cfg.n_interventions = InterventionCount::uniform(1, cfg.d);
    const Dag g = sample_dag(cfg, rng);
    EXPECT_EQ(icp_search(oracle_p(g), VarSet::range(1, g.d()), 0.05), oracle_s_icp(g));
  }
}

TEST(Screening, FullBudgetKeepsEveryUsableColumn) {
  Rng rng(5);
  GraphSamplerConfig cfg;
  cfg.d = 8;
  const LinearScm scm = sample_scm(sample_dag(cfg, rng), 1.0, rng);
  Dataset data = simulate(scm, 500, rng);
  data.x.col(3).setConstant(2.0);
  const auto r = screen_markov_boundary_path(data, 8);
  EXPECT_EQ(r.dropped, std::vector<int>{4});
  EXPECT_EQ(r.selected, (VarSet{1, 2, 3, 5, 6, 7, 8}));
  EXPECT_THROW(screen_markov_boundary(data, 9), ArgumentError);
}

TEST(Screening, FindsStrongParentsAndRespectsTheCap) {
  Rng rng(6);
  const int d = 20;
  Dataset data;
  const Eigen::Index n = 2000;
  data.env.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; i += 2) data.env[static_cast<std::size_t>(i)] = 1;
  data.x.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < d; ++k) data.x(i, k) = rng.normal();
  }
  data.y = 2.0 * data.x.col(2) - 1.5 * data.x.col(7) + 0.3 * Eigen::VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
  const auto r = screen_markov_boundary_path(data, 2);
  EXPECT_EQ(r.selected, (VarSet{3, 8}));
  EXPECT_EQ(r.order.front(), 3);
  const auto wide = screen_markov_boundary(data, 5);
  EXPECT_LE(wide.size(), 5);
  EXPECT_TRUE((VarSet{3, 8}).is_subset_of(wide));
}
