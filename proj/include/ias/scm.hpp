#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ias/dag.hpp"
#include "ias/rng.hpp"

namespace ias {

struct WeightedEdge {
  NodeId parent;
  NodeId child;
  double beta = 0.0;
};

/// Coefficient law: |beta| ~ U(low, high) with a fair random sign.
struct CoefficientRange {
  double low = 0.5;
  double high = 2.0;
};

/// Linear Gaussian SCM over a DAG. Edges out of E are not structural: the
/// children of E are do-intervened to `intervention_strength` when E = 1.
struct LinearScm {
  Dag dag;
  std::vector<WeightedEdge> coefficients;  // one per (X, Y)-internal edge, sorted by (parent, child)
  VarSet intervention_targets;             // = CH_E
  double intervention_strength = 1.0;
  double env_probability = 0.5;

  double coefficient(NodeId parent, NodeId child) const;
  /// Same mechanisms, different intervention strength.
  LinearScm with_strength(double strength) const;
};

/// n samples of (E, X, Y), E binary.
struct Dataset {
  std::vector<std::uint8_t> env;
  Eigen::MatrixXd x;  // n x d, column-major
  Eigen::VectorXd y;

  std::size_t n() const { return env.size(); }
  int d() const { return static_cast<int>(x.cols()); }
  std::size_t count_env(std::uint8_t e) const;
};

/// Draws one coefficient per internal edge, in (parent, child) order.
/// Targets are CH_E. Requires an exogenous DAG.
LinearScm sample_scm(const Dag& dag, double strength, Rng& rng, CoefficientRange range = {});

/// Generates n rows. E ~ Bernoulli(env_probability) is drawn first for all
/// rows; then, for each node in causal order, value = sum beta * parent +
/// N(0, 1), the column is divided by its empirical standard deviation
/// (population form, both environments), and if the node is a target, rows
/// with E = 1 are overwritten with the intervention strength. Y is never a
/// target. Throws ArgumentError for n < 2.
Dataset simulate(const LinearScm& scm, std::size_t n, Rng& rng);

/// Dataset CSV with header `E,X1,...,Xd,Y`.
void write_dataset_csv(std::ostream& out, const Dataset& data);
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv_file(const std::string& path);

/// SCM JSON: {"d", "mode", "edges": [[p, c], ...], "coefficients": [{"parent",
/// "child", "beta"}], "targets": [...], "strength", "env_probability"}.
nlohmann::json scm_to_json(const LinearScm& scm);
LinearScm scm_from_json(const nlohmann::json& j);

}  // namespace ias
