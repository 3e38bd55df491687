#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ias/dag.hpp"
#include "ias/invariance.hpp"
#include "ias/random_graphs.hpp"
#include "ias/varset.hpp"

namespace ias {

/// |A n B| / |A u B|, with J(empty, empty) = 0.
double jaccard(const VarSet& a, const VarSet& b);

enum class ExperimentKind {
  OracleLowdim,
  OracleHighdim,
  FiniteSample,
  MaxMi,
  Alpha0Sweep,
  WeakInterventions,
  CorrectionAblation,
};

std::string to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(const std::string& text);
bool is_ablation(ExperimentKind kind);

/// One entry of the intervention grid.
///   fixed n            -> exactly n children of E
///   uniform [lo, hi]   -> N ~ U{lo..hi}
///   fraction f         -> N ~ U{1..max(1, floor(f d))}
///   all                -> one cell per n in 1..d
struct InterventionSpec {
  enum class Kind { Fixed, Uniform, Fraction, All };
  Kind kind = Kind::Fixed;
  int low = 1;
  int high = 1;
  double fraction = 0.1;

  /// Concrete counts for a given d. All expands to d cells, or d - 1 when E
  /// is not exogenous (it keeps at least one X parent).
  std::vector<InterventionCount> expand(int d, EnvMode mode = EnvMode::Exogenous) const;
  static InterventionSpec parse(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::OracleLowdim;
  std::uint64_t seed = 1;
  EnvMode mode = EnvMode::Exogenous;
  std::string out;  // default output path; the CLI flag wins

  std::vector<int> d;
  std::vector<std::string> densities;
  /// Empty: 1 intervention for d <= 20, U{1..10} above (finite-sample only).
  std::vector<InterventionSpec> interventions;

  // Oracle studies.
  std::size_t graphs_per_cell = 5000;
  std::vector<int> m_values;          // high-dim: max sizes for the union
  std::uint64_t query_budget = 10'000'000;
  std::size_t mb_limit = 20;          // larger Markov boundaries are skipped

  // Finite-sample studies.
  std::vector<std::size_t> n;
  std::size_t scms = 20;
  std::size_t datasets_per_scm = 20;
  std::vector<double> strengths;
  std::vector<double> alpha0_values;
  std::vector<std::string> corrections;
  double alpha = 0.05;
  std::optional<int> m;               // unset: full search for d <= 20, m = 1 above
  int screening_k = 10;

  // Max-count simulation.
  std::size_t runs = 1;
  std::size_t batches = 10000;
  std::optional<std::size_t> patience;

  /// Defaults for each experiment, sized for a desk machine.
  static ExperimentConfig defaults(ExperimentKind kind);
  /// Overlays `j` on the defaults of its "experiment" key, or of `fallback`
  /// when the key is absent. Throws ArgumentError on unknown keys or bad values.
  static ExperimentConfig from_json(const nlohmann::json& j, ExperimentKind fallback);
  nlohmann::json to_json() const;
  void validate() const;
};

/// Output of a run: a tidy table with one row per (cell, replication).
struct ResultRecord {
  std::string cell_id;
  std::vector<std::string> values;  // aligned with the table header after cell_id
};

struct RunOutcome {
  std::size_t cells_run = 0;
  std::size_t cells_resumed = 0;
  std::size_t rows = 0;
  std::size_t budget_exceeded = 0;  // replications cut short by an enumeration budget
  std::size_t violations = 0;       // rows whose inclusion checks failed
  std::size_t estimator_failures = 0;
  bool partial() const { return budget_exceeded > 0; }
};

struct RunOptions {
  std::string out_path;
  int jobs = 1;
  bool resume = false;
  /// Optional per-cell progress callback (cell id, rows).
  std::function<void(const std::string&, std::size_t)> on_cell;
};

/// Runs `config` and writes `options.out_path` (CSV) plus a wall-time sidecar
/// `<out>.timing.csv`. Output bytes depend only on the config and seed.
RunOutcome run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Writes the table for `config` to a stream without resume support.
RunOutcome run_experiment(const ExperimentConfig& config, std::ostream& out, int jobs = 1);

std::vector<std::string> experiment_header(ExperimentKind kind);

/// Per-cell summaries of a result table: one row per (cell, metric) with count,
/// mean, median and, for 0/1 metrics, a 95% Wilson interval. With `nest_by`,
/// rows are first averaged within (cell, nest_by) groups.
void summarize(std::istream& in, std::ostream& out, const std::optional<std::string>& nest_by = std::nullopt);

struct WilsonInterval {
  double low = 0.0;
  double high = 1.0;
};
WilsonInterval wilson_interval(double successes, double trials, double z = 1.959963984540054);

/// Stable 64-bit key for a cell label.
std::uint64_t cell_key(const std::string& label);

}  // namespace ias
