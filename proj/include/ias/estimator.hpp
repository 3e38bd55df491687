#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ias/invariance.hpp"
#include "ias/scm.hpp"
#include "ias/varset.hpp"

namespace ias {

/// Maps a predictor set to an invariance p-value. May throw; failures are
/// treated as rejections by the searches.
using PValueFn = std::function<double(const VarSet&)>;

struct TestFailure {
  VarSet set;
  std::string message;
};

struct SearchReport {
  VarSet s_hat;
  std::vector<VarSet> accepted_family;  // in acceptance order
  std::size_t tested_count = 0;
  std::size_t skipped_count = 0;
  bool empty_set_rejected = false;
  bool stopped_early = false;
  std::vector<TestFailure> failures;
  DecisionConfig config;
  int d = 0;

  nlohmann::json to_json() const;
};

/// Ancestor search: accept sets in order of increasing size (lexicographic
/// within a size) whose p-value reaches the corrected level, skipping strict
/// supersets of accepted sets. The empty set is first tested at alpha0; if it
/// is not rejected the result is empty.
SearchReport ias_search(const PValueFn& p_value, int d, const DecisionConfig& config);
SearchReport ias_search(const Dataset& data, const DecisionConfig& config,
                        ExecutionPolicy policy = ExecutionPolicy::Serial);

/// Intersection of all accepted subsets of `candidates`; empty when nothing is
/// accepted. |candidates| <= 25.
VarSet icp_search(const PValueFn& p_value, const VarSet& candidates, double alpha);
VarSet icp_search(const Dataset& data, const VarSet& candidates, double alpha);

inline constexpr std::size_t kMaxIcpCandidates = 25;

struct ScreeningResult {
  VarSet selected;
  std::vector<int> order;      // entry order along the path, ties by index
  std::vector<int> dropped;    // constant columns
  double lambda = 0.0;         // penalty at which `selected` is active
};

/// Lasso path of Y on standardized X, descending from lambda_max on a
/// log-spaced grid; returns the active set at the smallest penalty where at
/// most k predictors are active. k >= number of usable columns returns all of
/// them.
ScreeningResult screen_markov_boundary_path(const Dataset& data, int k, int path_length = 100,
                                            double min_ratio = 1e-3, double tolerance = 1e-8);
VarSet screen_markov_boundary(const Dataset& data, int k);

}  // namespace ias
