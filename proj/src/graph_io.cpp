#include "ias/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

#include "ias/csv.hpp"
#include "ias/errors.hpp"

namespace ias {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view s, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ParseError(std::string("invalid ") + what + ": '" + std::string(s) + "'");
  }
  return value;
}

// Name -> predictor index, 0 for E, -1 for Y.
int classify(std::string_view name) {
  name = trim(name);
  if (name == "E") return 0;
  if (name == "Y") return -1;
  if (name.size() >= 2 && name.front() == 'X') {
    const int k = parse_int(name.substr(1), "node name");
    if (k < 1) throw ParseError("predictor names start at X1");
    return k;
  }
  throw ParseError("unknown node name '" + std::string(name) + "'");
}

std::uint32_t to_index(int code, int d) { return code < 0 ? static_cast<std::uint32_t>(d + 1) : static_cast<std::uint32_t>(code); }

EnvMode parse_mode(std::string_view s) {
  s = trim(s);
  if (s == "exogenous") return EnvMode::Exogenous;
  if (s == "nonexogenous" || s == "non-exogenous") return EnvMode::NonExogenous;
  throw ParseError("unknown mode '" + std::string(s) + "'");
}

}  // namespace

NodeId parse_node_name(std::string_view name, int d) {
  const int code = classify(name);
  if (code > d) throw ParseError("node " + std::string(name) + " exceeds d=" + std::to_string(d));
  return NodeId{to_index(code, d)};
}

Dag read_edge_list(std::istream& in) {
  std::optional<int> declared_d;
  EnvMode mode = EnvMode::Exogenous;
  std::vector<std::pair<int, int>> raw;
  int max_x = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      view = trim(view.substr(1));
      if (view.starts_with("d=")) declared_d = parse_int(trim(view.substr(2)), "d directive");
      if (view.starts_with("mode=")) mode = parse_mode(view.substr(5));
      continue;
    }
    std::istringstream fields{std::string(view)};
    std::string parent, child, extra;
    if (!(fields >> parent >> child) || (fields >> extra)) {
      throw ParseError("line " + std::to_string(lineno) + ": expected `parent child`");
    }
    const int p = classify(parent);
    const int c = classify(child);
    max_x = std::max({max_x, p, c});
    raw.emplace_back(p, c);
  }
  const int d = declared_d.value_or(max_x);
  if (max_x > d) throw ParseError("edge list mentions X" + std::to_string(max_x) + " but d=" + std::to_string(d));
  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (auto [p, c] : raw) edges.push_back(Edge{NodeId{to_index(p, d)}, NodeId{to_index(c, d)}});
  return Dag::from_edges(d, edges, mode);
}

Dag read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Dag& dag) {
  out << "# d=" << dag.d() << '\n';
  out << "# mode=" << (dag.mode() == EnvMode::Exogenous ? "exogenous" : "nonexogenous") << '\n';
  for (const Edge& e : dag.edges()) out << dag.name(e.parent) << ' ' << dag.name(e.child) << '\n';
}

Dag read_adjacency_csv(std::istream& in, EnvMode mode) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ParseError("adjacency CSV is empty");
  bool row_labels = false;
  if (!header.empty() && trim(header.front()).empty()) {
    row_labels = true;
    header.erase(header.begin());
  }
  std::vector<int> codes;
  int max_x = 0;
  for (const auto& name : header) {
    codes.push_back(classify(name));
    max_x = std::max(max_x, codes.back());
  }
  const int d = max_x;
  if (static_cast<int>(codes.size()) != d + 2) {
    throw ParseError("adjacency CSV must list E, X1..Xd and Y exactly once");
  }
  std::vector<Edge> edges;
  std::vector<std::string> row;
  std::size_t r = 0;
  while (reader.next(row)) {
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row_labels) row.erase(row.begin());
    if (r >= codes.size()) throw ParseError("adjacency CSV has more rows than columns");
    if (row.size() != codes.size()) throw ParseError("adjacency CSV row " + std::to_string(r + 1) + " has wrong width");
    for (std::size_t c = 0; c < row.size(); ++c) {
      const int v = parse_int(trim(row[c]), "adjacency entry");
      if (v != 0 && v != 1) throw ParseError("adjacency entries must be 0 or 1");
      if (v == 1) edges.push_back(Edge{NodeId{to_index(codes[r], d)}, NodeId{to_index(codes[c], d)}});
    }
    ++r;
  }
  if (r != codes.size()) throw ParseError("adjacency CSV is not square");
  return Dag::from_edges(d, edges, mode);
}

Dag read_adjacency_csv_file(const std::string& path, EnvMode mode) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_adjacency_csv(in, mode);
}

void write_adjacency_csv(std::ostream& out, const Dag& dag) {
  const std::size_t n = dag.node_count();
  for (std::size_t j = 0; j < n; ++j) out << (j ? "," : "") << dag.name(NodeId{static_cast<std::uint32_t>(j)});
  out << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out << (j ? "," : "") << (dag.has_edge(NodeId{static_cast<std::uint32_t>(i)}, NodeId{static_cast<std::uint32_t>(j)}) ? 1 : 0);
    }
    out << '\n';
  }
}

}  // namespace ias
