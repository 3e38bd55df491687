#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ias/dag.hpp"
#include "ias/graph_io.hpp"

namespace ias::testing {

// Builds a DAG from (parent, child) name pairs such as {"E", "X1"}.
inline Dag make_dag(int d, const std::vector<std::pair<std::string, std::string>>& names,
                    EnvMode mode = EnvMode::Exogenous) {
  std::vector<Edge> edges;
  for (const auto& [p, c] : names) edges.push_back({parse_node_name(p, d), parse_node_name(c, d)});
  return Dag::from_edges(d, edges, mode);
}

inline Dag figure_left() {
  return make_dag(4, {{"E", "X1"}, {"E", "X2"}, {"X1", "X3"}, {"X2", "X3"}, {"X2", "X4"}, {"X3", "Y"}, {"Y", "X4"}});
}

inline Dag figure_right() {
  return make_dag(4, {{"E", "X1"}, {"E", "X2"}, {"X1", "Y"}, {"X2", "X3"}, {"X2", "X4"}, {"X3", "Y"}, {"Y", "X4"}});
}

inline Dag chain() { return make_dag(2, {{"E", "X1"}, {"X1", "X2"}, {"X2", "Y"}}); }

// k disjoint two-step paths E -> X -> X -> Y: 2^k minimally invariant sets.
inline Dag parallel_paths(int k) {
  std::vector<std::pair<std::string, std::string>> e;
  for (int i = 0; i < k; ++i) {
    const std::string a = "X" + std::to_string(2 * i + 1);
    const std::string b = "X" + std::to_string(2 * i + 2);
    e.push_back({"E", a});
    e.push_back({a, b});
    e.push_back({b, "Y"});
  }
  return make_dag(2 * k, e);
}

}  // namespace ias::testing
