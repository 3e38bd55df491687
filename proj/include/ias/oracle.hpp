#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ias/dag.hpp"
#include "ias/separators.hpp"
#include "ias/varset.hpp"

namespace ias {

/// Graph-oracle invariance: S is invariant iff it d-separates E and Y.
bool oracle_invariant(const Dag& dag, const VarSet& s);

/// S is invariant and dropping any single member breaks invariance.
bool oracle_minimally_invariant(const Dag& dag, const VarSet& s);

/// Minimally invariant sets in canonical (size, lexicographic) order.
struct MinimalInvariantFamily {
  std::vector<VarSet> sets;
  std::uint64_t source_dag_fingerprint = 0;

  VarSet union_all() const;
  /// Union of members of size <= m.
  VarSet union_up_to(int m) const;
  /// Sizes of the smallest / largest member; nullopt for an empty family.
  std::optional<int> min_size() const;
  std::optional<int> max_size() const;
  bool empty() const { return sets.empty(); }
  std::size_t size() const { return sets.size(); }
};

/// Thrown when an enumeration exhausts its query budget.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t budget, MinimalInvariantFamily partial);
  const MinimalInvariantFamily& partial() const { return partial_; }

 private:
  MinimalInvariantFamily partial_;
};

enum class EnumerationBackend {
  /// Ascending-size scan over subsets of AN_Y with superset pruning.
  BruteForce,
  /// Minimal vertex separators of E and Y in the moralized ancestral graph.
  Separators,
  /// Brute force for max_size <= 2, separators otherwise.
  Auto,
};

enum class ExecutionPolicy { Serial, Parallel };

inline constexpr std::uint64_t kDefaultQueryBudget = 10'000'000;

struct EnumerationOptions {
  std::optional<int> max_size;
  /// Invariance queries (brute force) or closest-separator computations
  /// (separators) allowed before BudgetExceeded is thrown.
  std::uint64_t budget = kDefaultQueryBudget;
  EnumerationBackend backend = EnumerationBackend::Auto;
  /// Restrict candidate sets to these observed predictors (latent masking).
  std::optional<VarSet> observed;
  /// The brute-force backend may test each size class concurrently.
  ExecutionPolicy policy = ExecutionPolicy::Serial;
};

/// Lazy stream of minimally invariant sets from the separator backend, in
/// discovery order.
class MinimalInvariantStream {
 public:
  MinimalInvariantStream(const Dag& dag, const EnumerationOptions& options = {});
  std::optional<VarSet> next();
  std::uint64_t work() const { return stream_ ? stream_->work() : 0; }

 private:
  MoralGraph moral_;
  std::unique_ptr<MinimalSeparatorStream> stream_;
  std::uint64_t budget_;
  std::vector<VarSet> found_;
  std::uint64_t fingerprint_;
};

/// Every minimally invariant set (of size <= max_size when given), exactly
/// once, in canonical order. Empty when E is a parent of Y.
MinimalInvariantFamily enumerate_minimally_invariant(const Dag& dag, const EnumerationOptions& options = {});

/// Union of the minimally invariant sets of size <= max_size (all when unset).
VarSet oracle_s_as(const Dag& dag, std::optional<int> max_size = std::nullopt,
                   const EnumerationOptions& options = {});

/// Closed form PA_Y n (CH_E u PA(AN_Y n CH_E)); falls back to the exhaustive
/// intersection when E is a parent of Y or E is not exogenous.
VarSet oracle_s_icp(const Dag& dag);

/// Intersection of all invariant subsets of [d] (empty when none). d <= 20.
VarSet oracle_s_icp_bruteforce(const Dag& dag, ExecutionPolicy policy = ExecutionPolicy::Serial);

/// PA_Y u CH_Y u PA(CH_Y), without E and Y.
VarSet oracle_markov_boundary(const Dag& dag);

/// Intersection of all invariant subsets of MB_Y (empty when none). |MB_Y| <= 25.
VarSet oracle_s_icp_mb(const Dag& dag);

/// AN_Y restricted to predictors.
VarSet ancestors_of_response(const Dag& dag);

}  // namespace ias
