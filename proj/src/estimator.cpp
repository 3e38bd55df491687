#include "ias/estimator.hpp"

#include <algorithm>
#include <cstdint>

#include "ias/errors.hpp"

namespace ias {
namespace {

// Calls p_value, recording failures as p = 0.
double checked_p(const PValueFn& p_value, const VarSet& s, std::vector<TestFailure>& failures) {
  try {
    const double p = p_value(s);
    if (!(p >= 0.0 && p <= 1.0)) throw NumericalError("p-value outside [0, 1]");
    return p;
  } catch (const NumericalError& e) {
    failures.push_back({s, e.what()});
  } catch (const ArgumentError& e) {
    failures.push_back({s, e.what()});
  }
  return 0.0;
}

// Visits the size-k subsets of {1..d} in lexicographic order. The callback
// returns false to stop.
template <typename F>
bool for_each_subset_of_size(int d, int k, F&& visit) {
  std::vector<int> c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i + 1;
  while (true) {
    if (!visit(VarSet::from_indices(c))) return false;
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == d - k + i + 1) --i;
    if (i < 0) return true;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

nlohmann::json SearchReport::to_json() const {
  nlohmann::json j;
  j["s_hat"] = s_hat.to_vector();
  j["accepted_family"] = nlohmann::json::array();
  for (const auto& s : accepted_family) j["accepted_family"].push_back(s.to_vector());
  j["tested_count"] = tested_count;
  j["skipped_count"] = skipped_count;
  j["empty_set_rejected"] = empty_set_rejected;
  j["stopped_early"] = stopped_early;
  j["failures"] = nlohmann::json::array();
  for (const auto& f : failures) j["failures"].push_back({{"set", f.set.to_vector()}, {"message", f.message}});
  j["config"] = ias::to_json(config, d);
  j["d"] = d;
  return j;
}

SearchReport ias_search(const PValueFn& p_value, int d, const DecisionConfig& config) {
  if (d < 0) throw ArgumentError("d must be non-negative");
  config.validate(d);
  SearchReport report;
  report.config = config;
  report.d = d;

  const double p_empty = checked_p(p_value, VarSet{}, report.failures);
  report.tested_count = 1;
  if (phi_from_p(p_empty, config.alpha0) == 0) return report;
  report.empty_set_rejected = true;

  const int m = config.max_size(d);
  const VarSet everything = VarSet::range(1, d);
  // The empty set was already tested; its decision at the search level is
  // reused rather than repeated.
  if (phi_from_p(p_empty, config.level_for(0, d)) == 0) {
    report.accepted_family.push_back(VarSet{});
    // Every non-empty set is a strict superset of the empty set.
    for (int k = 1; k <= m; ++k) report.skipped_count += static_cast<std::size_t>(binomial_sum(d, k) - binomial_sum(d, k - 1));
    return report;
  }

  for (int k = 1; k <= m && !report.stopped_early; ++k) {
    const double level = config.level_for(static_cast<std::size_t>(k), d);
    for_each_subset_of_size(d, k, [&](const VarSet& s) {
      for (const auto& accepted : report.accepted_family) {
        if (accepted.is_subset_of(s)) {
          ++report.skipped_count;
          return true;
        }
      }
      ++report.tested_count;
      if (phi_from_p(checked_p(p_value, s, report.failures), level) == 0) {
        report.accepted_family.push_back(s);
        report.s_hat |= s;
        if (report.s_hat == everything) {
          report.stopped_early = true;
          return false;
        }
      }
      return true;
    });
  }
  return report;
}

SearchReport ias_search(const Dataset& data, const DecisionConfig& config, ExecutionPolicy policy) {
  const InvarianceTester tester(data, policy);
  return ias_search([&](const VarSet& s) { return tester.p_value(s); }, data.d(), config);
}

VarSet icp_search(const PValueFn& p_value, const VarSet& candidates, double alpha) {
  if (static_cast<std::size_t>(candidates.size()) > kMaxIcpCandidates) {
    throw ResourceError("ICP search over " + std::to_string(candidates.size()) + " candidates exceeds the limit of " +
                        std::to_string(kMaxIcpCandidates));
  }
  const auto members = candidates.to_vector();
  const std::uint64_t total = std::uint64_t{1} << members.size();
  std::vector<TestFailure> ignored;
  bool any = false;
  VarSet result;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    VarSet s;
    for (std::size_t i = 0; i < members.size(); ++i) {
      if (mask >> i & 1U) s.insert(members[i]);
    }
    // Once the running intersection is empty, further acceptances change nothing.
    if (any && result.empty()) break;
    if (phi_from_p(checked_p(p_value, s, ignored), alpha) == 0) {
      result = any ? (result & s) : s;
      any = true;
    }
  }
  return any ? result : VarSet{};
}

VarSet icp_search(const Dataset& data, const VarSet& candidates, double alpha) {
  const InvarianceTester tester(data);
  return icp_search([&](const VarSet& s) { return tester.p_value(s); }, candidates, alpha);
}

}  // namespace ias
