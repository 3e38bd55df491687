#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

#include "ias/kernels.hpp"
#include "ias/scm.hpp"
#include "ias/varset.hpp"

namespace ias {

enum class MeanTest { Welch, Pooled };

struct InvarianceTestResult {
  double p_value = 1.0;
  double mean_test_p = 1.0;
  double variance_test_p = 1.0;
  double t_dof = 0.0;
  int f_dof_env0 = 0;
  int f_dof_env1 = 0;
};

/// Residual invariance test: OLS of Y on X_S with intercept over the pooled
/// data, then equality of residual means (t-test) and variances (two-sided
/// F-test) between environments. p = min(1, 2 * min(p_mean, p_var)).
///
/// Moments are computed once; every p_value() call is O(|S|^3).
class InvarianceTester {
 public:
  explicit InvarianceTester(const Dataset& data, ExecutionPolicy policy = ExecutionPolicy::Serial,
                            MeanTest mean_test = MeanTest::Welch);
  explicit InvarianceTester(EnvMoments moments, MeanTest mean_test = MeanTest::Welch);

  int d() const { return moments_.d(); }
  const EnvMoments& moments() const { return moments_; }

  /// Throws NumericalError for a singular design, ArgumentError when S has an
  /// index outside [d] or the sample is too small for S.
  InvarianceTestResult test(const VarSet& s) const;
  double p_value(const VarSet& s) const { return test(s).p_value; }

 private:
  EnvMoments moments_;
  MeanTest mean_test_;
};

InvarianceTestResult invariance_p_value(const Dataset& data, const VarSet& s, MeanTest mean_test = MeanTest::Welch);

/// Same test computed from explicit residuals (QR least squares). Reference
/// for the moment-based path.
InvarianceTestResult invariance_p_value_direct(const Dataset& data, const VarSet& s,
                                               MeanTest mean_test = MeanTest::Welch);

/// Test statistics from per-environment residual summaries.
InvarianceTestResult combine_residual_tests(std::size_t n0, double sum0, double ssq0, std::size_t n1, double sum1,
                                            double ssq1, MeanTest mean_test);

/// 1 iff p < level.
inline int phi_from_p(double p, double level) { return p < level ? 1 : 0; }
int phi(const Dataset& data, const VarSet& s, double level);

/// Minimal-invariance decision: 1 if phi(S) = 1 or some phi(S \ {j}) = 0.
/// phi_mi(empty) = phi(empty).
using DecisionFn = std::function<int(const VarSet&)>;
int phi_mi(const DecisionFn& decide, const VarSet& s);
int phi_mi(const Dataset& data, const VarSet& s, double level);

enum class CorrectionKind { Full2d, Heuristic3Pow, Restricted, Explicit, Auto };

struct DecisionConfig {
  double alpha = 0.05;
  double alpha0 = 1e-6;
  std::optional<double> alpha1;
  CorrectionKind correction = CorrectionKind::Auto;
  double explicit_correction = 1.0;
  std::optional<int> m;

  /// Throws ArgumentError on out-of-range levels or C < 1.
  void validate(int d) const;
  int max_size(int d) const { return m ? std::min(*m, d) : d; }
  /// C for d predictors: 2^d, 3^ceil(d/3), sum_{i<=m} binom(d, i), or the
  /// explicit value. Auto picks the heuristic for a full search and C(m)
  /// otherwise.
  double correction_factor(int d) const;
  /// Level used for a set of the given size during the search.
  double level_for(std::size_t size, int d) const;
};

std::string to_string(CorrectionKind kind);
/// "full_2d", "heuristic_3pow", "restricted", "auto", or a number (explicit).
DecisionConfig& apply_correction(DecisionConfig& config, const std::string& text);
nlohmann::json to_json(const DecisionConfig& config, int d);

double binomial_sum(int d, int m);

}  // namespace ias
