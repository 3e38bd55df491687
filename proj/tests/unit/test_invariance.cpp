#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "graphs.hpp"
#include "ias/errors.hpp"
#include "ias/invariance.hpp"
#include "ias/random_graphs.hpp"

using namespace ias;

namespace {

Dataset small_fixture() {
  Dataset d;
  d.env = {0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  d.x.resize(16, 2);
  d.x.col(0) << 0.3, -1.2, 0.8, 1.5, -0.4, 0.1, 2.0, -0.7, 0.9, 1.1, -1.6, 0.5, 0.2, -0.3, 1.8, -1.0;
  d.x.col(1) << 1.0, 0.2, -0.5, 0.3, 0.9, -1.1, 0.4, 0.0, 1.3, -0.8, 0.6, -0.2, 0.7, 1.9, -1.4, 0.1;
  d.y.resize(16);
  d.y << 0.5, -0.9, 1.2, 2.1, -0.1, 0.4, 2.2, 0.3, 1.9, 1.4, -0.8, 1.6, 0.9, 0.8, 2.9, -0.2;
  return d;
}

Dataset noise_data(int d, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  GraphSamplerConfig cfg;
  cfg.d = d;
  cfg.n_interventions = InterventionCount::uniform(1, std::max(1, d / 3));
  return simulate(sample_scm(sample_dag(cfg, rng), 1.0, rng), n, rng);
}

}  // namespace

// Reference values computed with scipy.stats (ttest_ind, f.cdf) on the same data.
TEST(InvarianceTest, MatchesIndependentReferenceValues) {
  const Dataset d = small_fixture();
  struct Case {
    VarSet s;
    double welch, pooled, f, combined;
  };
  const std::vector<Case> cases{
      {{}, 0.72347765583304469, 0.72274389508762615, 0.95244656055454224, 1.0},
      {{1}, 0.00019513312606279394, 0.00029060124573250518, 0.17828494247722484, 0.00039026625212558788},
      {{1, 2}, 0.00016971389569139236, 0.00025806861270102221, 0.21807777674957776, 0.00033942779138278472},
  };
  for (const auto& c : cases) {
    const auto r = invariance_p_value(d, c.s);
    EXPECT_NEAR(r.mean_test_p, c.welch, 1e-10 * std::max(1.0, c.welch) + 1e-13) << c.s.to_string();
    EXPECT_NEAR(r.variance_test_p, c.f, 1e-10) << c.s.to_string();
    EXPECT_NEAR(r.p_value, c.combined, 1e-10) << c.s.to_string();
    EXPECT_NEAR(invariance_p_value(d, c.s, MeanTest::Pooled).mean_test_p, c.pooled, 1e-10) << c.s.to_string();
    const auto direct = invariance_p_value_direct(d, c.s);
    EXPECT_NEAR(direct.p_value, c.combined, 1e-10) << c.s.to_string();
  }
}

TEST(InvarianceTest, ParallelMomentsMatchSerialReference) {
  for (int d : {3, 12}) {
    const Dataset data = noise_data(d, 9000, 17 + static_cast<std::uint64_t>(d));
    const EnvMoments a = env_moments_serial(data);
    const EnvMoments b = env_moments_parallel(data);
    EXPECT_EQ(a.count, b.count);
    for (int e = 0; e < 2; ++e) {
      EXPECT_LT((a.gram[e] - b.gram[e]).cwiseAbs().maxCoeff(), 1e-8 * a.gram[e].cwiseAbs().maxCoeff());
    }
  }
}

TEST(InvarianceTest, MomentPathMatchesDirectResiduals) {
  const Dataset data = noise_data(6, 3000, 5);
  const InvarianceTester tester(data);
  for (std::uint64_t mask = 0; mask < 64; ++mask) {
    const VarSet s = VarSet::from_mask(mask);
    const auto a = tester.test(s);
    const auto b = invariance_p_value_direct(data, s);
    EXPECT_NEAR(a.mean_test_p, b.mean_test_p, 1e-7 + 1e-6 * b.mean_test_p) << s.to_string();
    EXPECT_NEAR(a.variance_test_p, b.variance_test_p, 1e-7 + 1e-6 * b.variance_test_p) << s.to_string();
  }
}

TEST(InvarianceTest, ErrorsNameTheProblem) {
  Dataset d = small_fixture();
  d.x.col(1) = d.x.col(0) * 2.0;
  try {
    (void)invariance_p_value(d, VarSet{1, 2});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("{1,2}"), std::string::npos);
  }
  Dataset one = small_fixture();
  std::fill(one.env.begin(), one.env.end(), 0);
  EXPECT_THROW(invariance_p_value(one, VarSet{}), ArgumentError);
  EXPECT_THROW(invariance_p_value(small_fixture(), VarSet{3}), ArgumentError);
}

TEST(InvarianceTest, PermutedLabelsGiveRoughlyUniformPValues) {
  Rng rng(99);
  const Dataset base = noise_data(4, 400, 3);
  int below = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    Dataset d = base;
    rng.shuffle(d.env);
    below += invariance_p_value(d, VarSet{}).p_value < 0.1 ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(below) / reps, 0.1, 0.05);
}

TEST(Phi, StrictBoundary) {
  EXPECT_EQ(phi_from_p(0.03, 0.05), 1);
  EXPECT_EQ(phi_from_p(0.05, 0.05), 0);
  EXPECT_EQ(phi_from_p(0.0, 0.0), 0);
  EXPECT_EQ(phi(small_fixture(), VarSet{1}, 0.0), 0);
}

TEST(Phi, MinimalInvarianceTruthTable) {
  // Every assignment of decisions to the subsets of S, |S| <= 3.
  for (int size = 0; size <= 3; ++size) {
    const VarSet s = VarSet::range(1, size);
    const int subsets = 1 << size;
    for (int pattern = 0; pattern < (1 << subsets); ++pattern) {
      auto decide = [&](const VarSet& t) {
        std::uint64_t bit = 0;
        t.for_each([&](int k) { bit |= 1ULL << (k - 1); });
        return (pattern >> bit) & 1;
      };
      int want = decide(s);
      if (want == 0) {
        for (int j = 1; j <= size; ++j) {
          VarSet t = s;
          t.erase(j);
          if (decide(t) == 0) want = 1;
        }
      }
      ASSERT_EQ(phi_mi(decide, s), want) << "size " << size << " pattern " << pattern;
    }
  }
}

TEST(DecisionConfig, CorrectionFactors) {
  DecisionConfig c;
  EXPECT_DOUBLE_EQ(c.correction_factor(6), 9.0);  // auto, full search
  c.m = 1;
  EXPECT_DOUBLE_EQ(c.correction_factor(100), 101.0);
  c.correction = CorrectionKind::Full2d;
  EXPECT_DOUBLE_EQ(c.correction_factor(6), 64.0);
  c.correction = CorrectionKind::Heuristic3Pow;
  EXPECT_DOUBLE_EQ(c.correction_factor(10), 81.0);
  EXPECT_DOUBLE_EQ(c.correction_factor(20), 2187.0);
  c.correction = CorrectionKind::Restricted;
  c.m = 2;
  EXPECT_DOUBLE_EQ(c.correction_factor(6), 22.0);
  apply_correction(c, "12.5");
  EXPECT_DOUBLE_EQ(c.correction_factor(6), 12.5);
  EXPECT_THROW(apply_correction(c, "bonferroni"), ArgumentError);
  EXPECT_THROW(apply_correction(c, "0.5"), ArgumentError);
}

TEST(DecisionConfig, LevelsAndValidation) {
  DecisionConfig c;
  c.m = 2;
  c.alpha1 = 0.1;
  EXPECT_DOUBLE_EQ(c.level_for(2, 6), 0.1);
  EXPECT_DOUBLE_EQ(c.level_for(1, 6), 0.05 / 22.0);
  c.alpha0 = 0.2;
  EXPECT_THROW(c.validate(6), ArgumentError);
  c.alpha0 = 1e-6;
  c.m = 7;
  EXPECT_THROW(c.validate(6), ArgumentError);
}
