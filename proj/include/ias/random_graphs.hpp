#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ias/dag.hpp"
#include "ias/rng.hpp"

namespace ias {

/// Edge probability for the (X, Y) part of a sampled graph.
struct Density {
  enum class Kind { Sparse, Dense, Explicit, Uniform };
  Kind kind = Kind::Sparse;
  double p = 0.0;      // Explicit
  double p_low = 0.0;  // Uniform prior: p ~ U(p_low, p_high)
  double p_high = 0.0;

  static Density sparse() { return {Kind::Sparse}; }
  static Density dense() { return {Kind::Dense}; }
  static Density explicit_p(double p) { return {Kind::Explicit, p}; }
  static Density uniform(double lo, double hi) { return {Kind::Uniform, 0.0, lo, hi}; }

  /// Sparse: 2/d (expected d + 1 edges over d + 1 nodes); dense: 0.75.
  /// parse() accepts sparse, dense, p=<x>, <x> and uniform:<low>:<high>.
  double draw(int d, Rng& rng) const;
  std::string to_string() const;
  static Density parse(const std::string& text);
};

/// Number of children of E; either fixed or uniform over [low, high].
struct InterventionCount {
  int low = 1;
  int high = 1;

  static InterventionCount fixed(int n) { return {n, n}; }
  static InterventionCount uniform(int lo, int hi) { return {lo, hi}; }
  int draw(Rng& rng) const { return rng.uniform_int(low, high); }
  std::string to_string() const;
};

struct GraphSamplerConfig {
  int d = 6;
  Density density = Density::sparse();
  InterventionCount n_interventions = InterventionCount::fixed(1);
  std::uint64_t rng_seed = 0;
  EnvMode mode = EnvMode::Exogenous;
  /// Place Y last in the causal order instead of choosing it uniformly among
  /// non-root nodes (used by the max-count simulation).
  bool response_last = false;
  std::uint64_t max_attempts = 100'000;

  /// Throws ArgumentError for d < 1, intervention bounds outside [1, d] or
  /// probabilities outside [0, 1].
  void validate() const;
};

/// Samples a DAG over (E, X, Y):
///  1. a uniform random permutation of the d + 1 (X, Y) nodes is the causal
///     order; each forward pair becomes an edge with probability p;
///  2. Y is a uniformly chosen non-root node (or the last node when
///     response_last is set); the rest become X_1..X_d in permutation order;
///  3. E gets n_interventions distinct X children (never Y); in non-exogenous
///     mode E is also placed at a random position of the order and receives
///     parents from the earlier X nodes with probability p (at least one);
///  4. steps 1-3 repeat until Y is a descendant of E.
Dag sample_dag(const GraphSamplerConfig& config, Rng& rng);
/// Convenience overload seeding the stream from config.rng_seed.
Dag sample_dag(const GraphSamplerConfig& config);

/// Edge count among the (X, Y) nodes only.
std::size_t internal_edge_count(const Dag& dag);

struct MaxCountResult {
  std::size_t max_count = 0;
  std::size_t draws = 0;
  bool stopped_early = false;
};

/// Largest number of minimally invariant sets over `batches` sampled DAGs
/// (Y last in the order). Stops after `patience` consecutive non-improving
/// draws when given.
MaxCountResult simulate_max_mi_count(const GraphSamplerConfig& priors, std::size_t batches,
                                     std::optional<std::size_t> patience, Rng& rng);

}  // namespace ias
