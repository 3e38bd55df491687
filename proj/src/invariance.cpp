#include "ias/invariance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "ias/errors.hpp"

namespace ias {
namespace {

void check_members(const VarSet& s, int d) {
  if (s.max_member() > d) throw ArgumentError("set " + s.to_string() + " has an index above d = " + std::to_string(d));
}

void check_sizes(std::size_t n0, std::size_t n1, std::size_t k) {
  if (n0 == 0 || n1 == 0) throw ArgumentError("invariance test needs data from both environments");
  if (n0 < 2 || n1 < 2) throw ArgumentError("each environment needs at least two samples");
  if (n0 + n1 <= k + 1) throw ArgumentError("too few samples for a regression on " + std::to_string(k) + " predictors");
}

double t_two_sided(double t, double dof) {
  boost::math::students_t_distribution<double> dist(dof);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

double f_two_sided(double f, double dof0, double dof1) {
  boost::math::fisher_f_distribution<double> dist(dof0, dof1);
  const double lower = boost::math::cdf(dist, f);
  const double upper = boost::math::cdf(boost::math::complement(dist, f));
  return std::min(1.0, 2.0 * std::min(lower, upper));
}

}  // namespace

InvarianceTestResult combine_residual_tests(std::size_t n0, double sum0, double ssq0, std::size_t n1, double sum1,
                                            double ssq1, MeanTest mean_test) {
  check_sizes(n0, n1, 0);
  const double a = static_cast<double>(n0);
  const double b = static_cast<double>(n1);
  const double mean0 = sum0 / a;
  const double mean1 = sum1 / b;
  const double var0 = std::max(0.0, ssq0 - sum0 * mean0) / (a - 1.0);
  const double var1 = std::max(0.0, ssq1 - sum1 * mean1) / (b - 1.0);
  if (!(var0 > 0.0) || !(var1 > 0.0) || !std::isfinite(var0) || !std::isfinite(var1)) {
    throw NumericalError("residual variance is zero or not finite in one environment");
  }

  InvarianceTestResult r;
  double t = 0.0;
  if (mean_test == MeanTest::Welch) {
    const double q0 = var0 / a;
    const double q1 = var1 / b;
    t = (mean0 - mean1) / std::sqrt(q0 + q1);
    r.t_dof = (q0 + q1) * (q0 + q1) / (q0 * q0 / (a - 1.0) + q1 * q1 / (b - 1.0));
  } else {
    r.t_dof = a + b - 2.0;
    const double pooled = ((a - 1.0) * var0 + (b - 1.0) * var1) / r.t_dof;
    t = (mean0 - mean1) / std::sqrt(pooled * (1.0 / a + 1.0 / b));
  }
  r.mean_test_p = t_two_sided(t, r.t_dof);
  r.f_dof_env0 = static_cast<int>(n0) - 1;
  r.f_dof_env1 = static_cast<int>(n1) - 1;
  r.variance_test_p = f_two_sided(var0 / var1, a - 1.0, b - 1.0);
  r.p_value = std::min(1.0, 2.0 * std::min(r.mean_test_p, r.variance_test_p));
  return r;
}

InvarianceTester::InvarianceTester(const Dataset& data, ExecutionPolicy policy, MeanTest mean_test)
    : moments_(env_moments(data, policy)), mean_test_(mean_test) {}

InvarianceTester::InvarianceTester(EnvMoments moments, MeanTest mean_test)
    : moments_(std::move(moments)), mean_test_(mean_test) {}

InvarianceTestResult InvarianceTester::test(const VarSet& s) const {
  const int d = moments_.d();
  check_members(s, d);
  check_sizes(moments_.count[0], moments_.count[1], s.size());

  std::vector<Eigen::Index> idx{0};
  s.for_each([&](int k) { idx.push_back(k); });
  const auto k = static_cast<Eigen::Index>(idx.size());
  const Eigen::Index yc = d + 1;

  const Eigen::MatrixXd pooled = moments_.pooled();
  Eigen::MatrixXd a(k, k);
  Eigen::VectorXd rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    rhs(i) = pooled(idx[static_cast<std::size_t>(i)], yc);
    for (Eigen::Index j = 0; j < k; ++j) a(i, j) = pooled(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  // Scale to unit diagonal before judging the conditioning.
  const Eigen::VectorXd diag = a.diagonal();
  if ((diag.array() <= 1e-12 * diag(0)).any()) throw NumericalError("singular design for S = " + s.to_string());
  const Eigen::VectorXd scale = diag.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd scaled = scale.asDiagonal() * a * scale.asDiagonal();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(scaled);
  // LDLT pseudo-inverts zero pivots, so rcond() alone misses exact collinearity.
  const Eigen::VectorXd pivots = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || pivots.minCoeff() < 1e-12 * pivots.maxCoeff() || ldlt.rcond() < 1e-12) {
    throw NumericalError("singular design for S = " + s.to_string());
  }
  const Eigen::VectorXd beta = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * rhs);

  std::array<double, 2> sum{};
  std::array<double, 2> ssq{};
  for (int e = 0; e < 2; ++e) {
    const Eigen::MatrixXd& g = moments_.gram[e];
    Eigen::MatrixXd ge(k, k);
    Eigen::VectorXd gy(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      gy(i) = g(idx[static_cast<std::size_t>(i)], yc);
      for (Eigen::Index j = 0; j < k; ++j) ge(i, j) = g(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    sum[e] = g(0, yc) - ge.row(0).dot(beta);
    ssq[e] = g(yc, yc) - 2.0 * beta.dot(gy) + beta.dot(ge * beta);
  }
  return combine_residual_tests(moments_.count[0], sum[0], ssq[0], moments_.count[1], sum[1], ssq[1], mean_test_);
}

InvarianceTestResult invariance_p_value(const Dataset& data, const VarSet& s, MeanTest mean_test) {
  return InvarianceTester(data, ExecutionPolicy::Serial, mean_test).test(s);
}

InvarianceTestResult invariance_p_value_direct(const Dataset& data, const VarSet& s, MeanTest mean_test) {
  check_members(s, data.d());
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto members = s.to_vector();
  Eigen::MatrixXd design(n, static_cast<Eigen::Index>(members.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t j = 0; j < members.size(); ++j) design.col(static_cast<Eigen::Index>(j) + 1) = data.x.col(members[j] - 1);
  check_sizes(data.count_env(0), data.count_env(1), members.size());

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < design.cols()) throw NumericalError("singular design for S = " + s.to_string());
  const Eigen::VectorXd residual = data.y - design * qr.solve(data.y);

  std::array<double, 2> sum{};
  std::array<double, 2> ssq{};
  std::array<std::size_t, 2> count{};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto e = data.env[static_cast<std::size_t>(i)];
    sum[e] += residual(i);
    ssq[e] += residual(i) * residual(i);
    ++count[e];
  }
  return combine_residual_tests(count[0], sum[0], ssq[0], count[1], sum[1], ssq[1], mean_test);
}

int phi(const Dataset& data, const VarSet& s, double level) {
  return phi_from_p(invariance_p_value(data, s).p_value, level);
}

int phi_mi(const DecisionFn& decide, const VarSet& s) {
  if (decide(s) == 1) return 1;
  bool subset_accepted = false;
  s.for_each([&](int j) {
    if (subset_accepted) return;
    VarSet smaller = s;
    smaller.erase(j);
    if (decide(smaller) == 0) subset_accepted = true;
  });
  return subset_accepted ? 1 : 0;
}

int phi_mi(const Dataset& data, const VarSet& s, double level) {
  const InvarianceTester tester(data);
  return phi_mi([&](const VarSet& t) { return phi_from_p(tester.p_value(t), level); }, s);
}

double binomial_sum(int d, int m) {
  double total = 0.0;
  double term = 1.0;
  for (int i = 0; i <= std::min(m, d); ++i) {
    total += term;
    term = term * static_cast<double>(d - i) / static_cast<double>(i + 1);
  }
  return total;
}

void DecisionConfig::validate(int d) const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
  if (!(alpha0 >= 0.0 && alpha0 <= alpha)) throw ArgumentError("alpha0 must lie in [0, alpha]");
  if (alpha1 && !(*alpha1 >= alpha && *alpha1 <= 1.0)) throw ArgumentError("alpha1 must lie in [alpha, 1]");
  if (m && *m < 0) throw ArgumentError("m must be non-negative");
  if (m && *m > d) throw ArgumentError("m must not exceed d");
  if (!(correction_factor(d) >= 1.0)) throw ArgumentError("correction factor must be at least 1");
}

double DecisionConfig::correction_factor(int d) const {
  switch (correction) {
    case CorrectionKind::Full2d:
      return std::ldexp(1.0, d);
    case CorrectionKind::Heuristic3Pow:
      return std::pow(3.0, (d + 2) / 3);
    case CorrectionKind::Restricted:
      return binomial_sum(d, max_size(d));
    case CorrectionKind::Explicit:
      return explicit_correction;
    case CorrectionKind::Auto:
      return max_size(d) >= d ? std::pow(3.0, (d + 2) / 3) : binomial_sum(d, max_size(d));
  }
  return 1.0;
}

double DecisionConfig::level_for(std::size_t size, int d) const {
  if (alpha1 && static_cast<int>(size) == max_size(d)) return *alpha1;
  return alpha / correction_factor(d);
}

std::string to_string(CorrectionKind kind) {
  switch (kind) {
    case CorrectionKind::Full2d:
      return "full_2d";
    case CorrectionKind::Heuristic3Pow:
      return "heuristic_3pow";
    case CorrectionKind::Restricted:
      return "restricted";
    case CorrectionKind::Explicit:
      return "explicit";
    case CorrectionKind::Auto:
      return "auto";
  }
  return "auto";
}

DecisionConfig& apply_correction(DecisionConfig& config, const std::string& text) {
  if (text == "full_2d") {
    config.correction = CorrectionKind::Full2d;
  } else if (text == "heuristic_3pow") {
    config.correction = CorrectionKind::Heuristic3Pow;
  } else if (text == "restricted") {
    config.correction = CorrectionKind::Restricted;
  } else if (text == "auto") {
    config.correction = CorrectionKind::Auto;
  } else {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size() || !(value >= 1.0)) throw ArgumentError("unknown correction '" + text + "'");
    config.correction = CorrectionKind::Explicit;
    config.explicit_correction = value;
  }
  return config;
}

nlohmann::json to_json(const DecisionConfig& config, int d) {
  nlohmann::json j;
  j["alpha"] = config.alpha;
  j["alpha0"] = config.alpha0;
  j["alpha1"] = config.alpha1 ? nlohmann::json(*config.alpha1) : nlohmann::json(nullptr);
  j["correction"] = to_string(config.correction);
  j["correction_factor"] = config.correction_factor(d);
  j["m"] = config.max_size(d);
  return j;
}

}  // namespace ias
