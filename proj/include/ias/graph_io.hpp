#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ias/dag.hpp"

namespace ias {

/// Edge-list text format: one `parent child` pair per line using node names
/// `E`, `X<k>` and `Y`. Lines starting with `#` are comments, except the
/// directives `# d=<k>` (predictor count; defaults to the largest X index
/// seen) and `# mode=exogenous|nonexogenous`.
Dag read_edge_list(std::istream& in);
Dag read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Dag& dag);

/// Adjacency-matrix CSV: a header row of node names, then one row per node in
/// header order; entry (i, j) = 1 means an edge from node i to node j. A
/// leading row-label column is accepted when the header's first cell is empty.
Dag read_adjacency_csv(std::istream& in, EnvMode mode = EnvMode::Exogenous);
Dag read_adjacency_csv_file(const std::string& path, EnvMode mode = EnvMode::Exogenous);
void write_adjacency_csv(std::ostream& out, const Dag& dag);

/// Parses `E`, `Y` or `X<k>`; `d` resolves Y to index d + 1.
NodeId parse_node_name(std::string_view name, int d);

}  // namespace ias
