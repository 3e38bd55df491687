#include "ias/scm.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "ias/csv.hpp"
#include "ias/errors.hpp"
#include "ias/graph_io.hpp"

namespace ias {

double LinearScm::coefficient(NodeId parent, NodeId child) const {
  for (const auto& w : coefficients) {
    if (w.parent == parent && w.child == child) return w.beta;
  }
  return 0.0;
}

LinearScm LinearScm::with_strength(double strength) const {
  LinearScm copy = *this;
  copy.intervention_strength = strength;
  return copy;
}

std::size_t Dataset::count_env(std::uint8_t e) const {
  std::size_t n = 0;
  for (auto v : env) n += v == e ? 1 : 0;
  return n;
}

LinearScm sample_scm(const Dag& dag, double strength, Rng& rng, CoefficientRange range) {
  if (dag.mode() != EnvMode::Exogenous) throw ArgumentError("sample_scm requires an exogenous DAG");
  if (!(range.low >= 0.0 && range.low < range.high)) throw ArgumentError("invalid coefficient range");
  LinearScm scm{dag, {}, relatives(dag, dag.env(), Relation::Children).predictors(dag.d()), strength, 0.5};
  for (const Edge& e : dag.edges()) {
    if (e.parent == dag.env()) continue;
    const double magnitude = rng.uniform(range.low, range.high);
    const double sign = rng.bernoulli(0.5) ? -1.0 : 1.0;
    scm.coefficients.push_back(WeightedEdge{e.parent, e.child, sign * magnitude});
  }
  return scm;
}

Dataset simulate(const LinearScm& scm, std::size_t n, Rng& rng) {
  if (n < 2) throw ArgumentError("simulate needs n >= 2 to standardize columns");
  const Dag& dag = scm.dag;
  const int d = dag.d();
  Dataset data;
  data.env.resize(n);
  for (auto& e : data.env) e = rng.bernoulli(scm.env_probability) ? 1 : 0;

  // Incoming weights per node, aligned with the coefficient list.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> incoming(dag.node_count());
  for (const auto& w : scm.coefficients) incoming[w.child.index].emplace_back(w.parent.index, w.beta);

  // Column c holds node c (1..d for X, d + 1 for Y); column 0 unused.
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n), d + 2);
  values.col(0).setZero();
  const auto rows = static_cast<Eigen::Index>(n);
  for (auto v : dag.topological_order()) {
    if (v == 0) continue;
    auto col = values.col(v);
    for (Eigen::Index i = 0; i < rows; ++i) {
      double value = rng.normal();
      for (const auto& [parent, beta] : incoming[v]) value += beta * values(i, parent);
      col(i) = value;
    }
    const double mean = col.mean();
    const double sd = std::sqrt((col.array() - mean).square().mean());
    if (!(sd > 0.0)) throw NumericalError("degenerate column for " + dag.name(NodeId{v}));
    col /= sd;
    if (scm.intervention_targets.contains(static_cast<int>(v))) {
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (data.env[static_cast<std::size_t>(i)]) col(i) = scm.intervention_strength;
      }
    }
  }
  data.x = values.middleCols(1, d);
  data.y = values.col(d + 1);
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  const int d = data.d();
  out << "E";
  for (int k = 1; k <= d; ++k) out << ",X" << k;
  out << ",Y\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << static_cast<int>(data.env[i]);
    for (int k = 0; k < d; ++k) out << ',' << format_double(data.x(r, k));
    out << ',' << format_double(data.y(r)) << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  CsvReader reader(in);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ParseError("dataset CSV is empty");
  const int width = static_cast<int>(header.size());
  if (width < 2 || header.front() != "E" || header.back() != "Y") {
    throw ParseError("dataset CSV header must be E,X1,...,Xd,Y");
  }
  const int d = width - 2;
  for (int k = 1; k <= d; ++k) {
    if (header[static_cast<std::size_t>(k)] != "X" + std::to_string(k)) {
      throw ParseError("dataset CSV column " + std::to_string(k + 1) + " must be X" + std::to_string(k));
    }
  }
  std::vector<std::uint8_t> env;
  std::vector<double> cells;
  std::vector<std::string> row;
  std::size_t line = 1;
  while (reader.next(row)) {
    ++line;
    if (row.size() == 1 && row[0].empty()) continue;
    if (static_cast<int>(row.size()) != width) throw ParseError("dataset CSV line " + std::to_string(line) + " has wrong width");
    if (row[0] != "0" && row[0] != "1") throw ParseError("dataset CSV line " + std::to_string(line) + ": E must be 0 or 1");
    env.push_back(row[0] == "1" ? 1 : 0);
    for (int c = 1; c < width; ++c) {
      try {
        std::size_t used = 0;
        const std::string& cell = row[static_cast<std::size_t>(c)];
        const double v = std::stod(cell, &used);
        if (used != cell.size() || !std::isfinite(v)) throw ParseError("bad");
        cells.push_back(v);
      } catch (const std::exception&) {
        throw ParseError("dataset CSV line " + std::to_string(line) + ": non-numeric or missing value");
      }
    }
  }
  Dataset data;
  const auto n = static_cast<Eigen::Index>(env.size());
  data.env = std::move(env);
  data.x.resize(n, d);
  data.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * static_cast<std::size_t>(d + 1);
    for (int k = 0; k < d; ++k) data.x(i, k) = cells[base + static_cast<std::size_t>(k)];
    data.y(i) = cells[base + static_cast<std::size_t>(d)];
  }
  return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return read_dataset_csv(in);
}

nlohmann::json scm_to_json(const LinearScm& scm) {
  const Dag& dag = scm.dag;
  nlohmann::json j;
  j["d"] = dag.d();
  j["mode"] = dag.mode() == EnvMode::Exogenous ? "exogenous" : "nonexogenous";
  j["edges"] = nlohmann::json::array();
  for (const Edge& e : dag.edges()) j["edges"].push_back({dag.name(e.parent), dag.name(e.child)});
  j["coefficients"] = nlohmann::json::array();
  for (const auto& w : scm.coefficients) {
    j["coefficients"].push_back({{"parent", dag.name(w.parent)}, {"child", dag.name(w.child)}, {"beta", w.beta}});
  }
  j["targets"] = scm.intervention_targets.to_vector();
  j["strength"] = scm.intervention_strength;
  j["env_probability"] = scm.env_probability;
  return j;
}

LinearScm scm_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const std::string mode = j.value("mode", "exogenous");
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
      edges.push_back(Edge{parse_node_name(e.at(0).get<std::string>(), d), parse_node_name(e.at(1).get<std::string>(), d)});
    }
    LinearScm scm{Dag::from_edges(d, edges, mode == "exogenous" ? EnvMode::Exogenous : EnvMode::NonExogenous),
                  {},
                  {},
                  j.value("strength", 1.0),
                  j.value("env_probability", 0.5)};
    for (const auto& c : j.at("coefficients")) {
      const NodeId p = parse_node_name(c.at("parent").get<std::string>(), d);
      const NodeId ch = parse_node_name(c.at("child").get<std::string>(), d);
      if (!scm.dag.has_edge(p, ch) || p == scm.dag.env()) throw ParseError("coefficient on a non-structural edge");
      scm.coefficients.push_back(WeightedEdge{p, ch, c.at("beta").get<double>()});
    }
    std::sort(scm.coefficients.begin(), scm.coefficients.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
      return std::tie(a.parent, a.child) < std::tie(b.parent, b.child);
    });
    const std::size_t structural = scm.dag.edge_count() - scm.dag.children(scm.dag.env()).size() -
                                   scm.dag.parents(scm.dag.env()).size();
    if (scm.coefficients.size() != structural) throw ParseError("SCM JSON must give one coefficient per structural edge");
    for (int k : j.at("targets").get<std::vector<int>>()) scm.intervention_targets.insert(k);
    return scm;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed SCM JSON: ") + e.what());
  }
}

}  // namespace ias
