#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "graphs.hpp"
#include "ias/errors.hpp"
#include "ias/random_graphs.hpp"
#include "ias/scm.hpp"

using namespace ias;
using namespace ias::testing;

TEST(Scm, CoefficientsCoverInternalEdgesWithinSupport) {
  Rng rng(1);
  const Dag g = figure_left();
  const LinearScm scm = sample_scm(g, 1.0, rng);
  EXPECT_EQ(scm.coefficients.size(), 5u);  // 7 edges minus the 2 out of E
  for (const auto& w : scm.coefficients) {
    EXPECT_NE(w.parent, g.env());
    EXPECT_GT(std::abs(w.beta), 0.5);
    EXPECT_LT(std::abs(w.beta), 2.0);
  }
  EXPECT_EQ(scm.intervention_targets, (VarSet{1, 2}));
}

TEST(Scm, SignsAreBalanced) {
  Rng rng(2);
  const Dag g = make_dag(1, {{"E", "X1"}, {"X1", "Y"}});
  int negative = 0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) negative += sample_scm(g, 1.0, rng).coefficients[0].beta < 0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(negative) / draws, 0.5, 0.02);
}

TEST(Scm, DeterministicUnderSeed) {
  const Dag g = figure_left();
  Rng a(3), b(3);
  const LinearScm s1 = sample_scm(g, 1.0, a);
  const LinearScm s2 = sample_scm(g, 1.0, b);
  for (std::size_t i = 0; i < s1.coefficients.size(); ++i) EXPECT_EQ(s1.coefficients[i].beta, s2.coefficients[i].beta);
  const Dataset d1 = simulate(s1, 50, a);
  const Dataset d2 = simulate(s2, 50, b);
  EXPECT_EQ(d1.x, d2.x);
  EXPECT_EQ(d1.y, d2.y);
  EXPECT_EQ(d1.env, d2.env);
}

TEST(Scm, InterventionsFixTargetsInEnvironmentOne) {
  Rng rng(4);
  const LinearScm scm = sample_scm(figure_left(), 0.5, rng);
  const Dataset data = simulate(scm, 2000, rng);
  ASSERT_GT(data.count_env(1), 0u);
  for (std::size_t i = 0; i < data.n(); ++i) {
    if (!data.env[i]) continue;
    EXPECT_EQ(data.x(static_cast<Eigen::Index>(i), 0), 0.5);
    EXPECT_EQ(data.x(static_cast<Eigen::Index>(i), 1), 0.5);
  }
  EXPECT_NEAR(static_cast<double>(data.count_env(1)) / 2000.0, 0.5, 0.05);
}

TEST(Scm, NonTargetColumnsAreStandardized) {
  Rng rng(5);
  const LinearScm scm = sample_scm(figure_left(), 1.0, rng);
  const Dataset data = simulate(scm, 5000, rng);
  auto sd = [](const Eigen::VectorXd& v) { return std::sqrt((v.array() - v.mean()).square().mean()); };
  EXPECT_NEAR(sd(data.x.col(2)), 1.0, 1e-12);
  EXPECT_NEAR(sd(data.x.col(3)), 1.0, 1e-12);
  EXPECT_NEAR(sd(data.y), 1.0, 1e-12);
}

TEST(Scm, NonDescendantsOfEnvironmentKeepTheirDistribution) {
  // X2 is a root not reached from E: KS p-values over repeated draws should
  // look uniform, so rejections at 5% stay rare.
  const Dag g = make_dag(2, {{"E", "X1"}, {"X1", "Y"}, {"X2", "Y"}});
  Rng rng(6);
  int rejections = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const Dataset data = simulate(sample_scm(g, 1.0, rng), 400, rng);
    std::vector<double> a, b;
    for (std::size_t i = 0; i < data.n(); ++i) (data.env[i] ? b : a).push_back(data.x(static_cast<Eigen::Index>(i), 1));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double dmax = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] <= b[j]) ++i;
      else ++j;
      dmax = std::max(dmax, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    const double ne = static_cast<double>(a.size() * b.size()) / static_cast<double>(a.size() + b.size());
    // Kolmogorov tail with the usual small-sample adjustment.
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * dmax;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) p += 2.0 * (k % 2 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    if (std::clamp(p, 0.0, 1.0) < 0.05) ++rejections;
  }
  EXPECT_LE(rejections, 25);  // 5% of 200 is 10; binomial tail well below 25
}

TEST(Scm, RejectsTinySamplesAndNonExogenousGraphs) {
  Rng rng(7);
  const LinearScm scm = sample_scm(chain(), 1.0, rng);
  EXPECT_THROW(simulate(scm, 1, rng), ArgumentError);
  const Dag ne = make_dag(2, {{"X1", "E"}, {"E", "X2"}, {"X2", "Y"}}, EnvMode::NonExogenous);
  EXPECT_THROW(sample_scm(ne, 1.0, rng), ArgumentError);
}

TEST(Scm, DatasetCsvRoundTrip) {
  Rng rng(8);
  const Dataset data = simulate(sample_scm(figure_right(), 1.0, rng), 30, rng);
  std::stringstream ss;
  write_dataset_csv(ss, data);
  const Dataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.env, data.env);
  EXPECT_EQ(back.x, data.x);
  EXPECT_EQ(back.y, data.y);
  std::istringstream bad("E,X1,Y\n2,0.1,0.2\n");
  EXPECT_THROW(read_dataset_csv(bad), ParseError);
  std::istringstream missing("E,X1,Y\n1,,0.2\n");
  EXPECT_THROW(read_dataset_csv(missing), ParseError);
}

TEST(Scm, JsonRoundTrip) {
  Rng rng(9);
  const LinearScm scm = sample_scm(figure_left(), 0.5, rng);
  const LinearScm back = scm_from_json(nlohmann::json::parse(scm_to_json(scm).dump()));
  EXPECT_EQ(back.dag.fingerprint(), scm.dag.fingerprint());
  EXPECT_EQ(back.intervention_targets, scm.intervention_targets);
  EXPECT_EQ(back.intervention_strength, 0.5);
  for (const auto& w : scm.coefficients) EXPECT_EQ(back.coefficient(w.parent, w.child), w.beta);
}
