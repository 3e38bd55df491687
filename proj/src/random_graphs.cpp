#include "ias/random_graphs.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <vector>

#include "ias/errors.hpp"
#include "ias/oracle.hpp"

namespace ias {

double Density::draw(int d, Rng& rng) const {
  switch (kind) {
    case Kind::Sparse:
      return std::min(1.0, 2.0 / static_cast<double>(d));
    case Kind::Dense:
      return 0.75;
    case Kind::Explicit:
      return p;
    case Kind::Uniform:
      return rng.uniform(p_low, p_high);
  }
  return 0.0;
}

std::string Density::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Sparse:
      return "sparse";
    case Kind::Dense:
      return "dense";
    case Kind::Explicit:
      os << "p=" << p;
      return os.str();
    case Kind::Uniform:
      os << "uniform:" << p_low << ":" << p_high;
      return os.str();
  }
  return "?";
}

Density Density::parse(const std::string& text) {
  if (text == "sparse") return sparse();
  if (text == "dense") return dense();
  if (text.starts_with("uniform:")) {
    const auto colon = text.find(':', 8);
    try {
      std::size_t a = 0;
      std::size_t b = 0;
      const std::string lo = text.substr(8, colon - 8);
      const std::string hi = colon == std::string::npos ? "" : text.substr(colon + 1);
      const double low = std::stod(lo, &a);
      const double high = std::stod(hi, &b);
      if (a == lo.size() && b == hi.size()) return uniform(low, high);
    } catch (const std::exception&) {
    }
    throw ArgumentError("uniform density must read uniform:<low>:<high>, got '" + text + "'");
  }
  try {
    std::size_t used = 0;
    const std::string body = text.starts_with("p=") ? text.substr(2) : text;
    const double p = std::stod(body, &used);
    if (used == body.size()) return explicit_p(p);
  } catch (const std::exception&) {
  }
  throw ArgumentError("density must be sparse, dense or a probability, got '" + text + "'");
}

std::string InterventionCount::to_string() const {
  if (low == high) return std::to_string(low);
  return std::to_string(low) + "-" + std::to_string(high);
}

void GraphSamplerConfig::validate() const {
  if (d < 1) throw ArgumentError("graph sampler needs d >= 1");
  if (n_interventions.low < 1 || n_interventions.high > d || n_interventions.low > n_interventions.high) {
    throw ArgumentError("intervention count must satisfy 1 <= n <= d, got " + n_interventions.to_string());
  }
  // A non-exogenous E keeps at least one X parent, so at most d - 1 children.
  if (mode == EnvMode::NonExogenous && n_interventions.high > d - 1) {
    throw ArgumentError("non-exogenous sampling allows at most d - 1 interventions, got " + n_interventions.to_string());
  }
  auto check_p = [](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("edge probability outside [0, 1]");
  };
  if (density.kind == Density::Kind::Explicit) check_p(density.p);
  if (density.kind == Density::Kind::Uniform) {
    check_p(density.p_low);
    check_p(density.p_high);
    if (density.p_low > density.p_high) throw ArgumentError("density prior bounds reversed");
  }
  if (max_attempts == 0) throw ArgumentError("max_attempts must be positive");
}

namespace {

/// One attempt; returns nullopt when the draw is rejected.
std::optional<Dag> attempt(const GraphSamplerConfig& cfg, Rng& rng) {
  const int d = cfg.d;
  const int m = d + 1;  // (X, Y) nodes
  const double p = cfg.density.draw(d, rng);
  const int n_int = cfg.n_interventions.draw(rng);

  // order[pos] = raw label of the node at position pos.
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  // Raw edges between positions i < j.
  std::vector<std::pair<int, int>> raw;
  std::vector<bool> has_parent(static_cast<std::size_t>(m), false);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      if (rng.bernoulli(p)) {
        raw.emplace_back(i, j);
        has_parent[static_cast<std::size_t>(j)] = true;
      }
    }
  }

  int y_pos;
  if (cfg.response_last) {
    y_pos = m - 1;
    if (!has_parent[static_cast<std::size_t>(y_pos)]) return std::nullopt;
  } else {
    std::vector<int> non_roots;
    for (int pos = 0; pos < m; ++pos) {
      if (has_parent[static_cast<std::size_t>(pos)]) non_roots.push_back(pos);
    }
    if (non_roots.empty()) return std::nullopt;
    y_pos = non_roots[rng.below(non_roots.size())];
  }

  // Positions other than Y become X_1..X_d in causal order.
  std::vector<std::uint32_t> node_at(static_cast<std::size_t>(m));
  std::uint32_t next_x = 1;
  for (int pos = 0; pos < m; ++pos) {
    node_at[static_cast<std::size_t>(pos)] = pos == y_pos ? static_cast<std::uint32_t>(d + 1) : next_x++;
  }

  std::vector<Edge> edges;
  edges.reserve(raw.size() + static_cast<std::size_t>(n_int) + 4);
  for (auto [i, j] : raw) {
    edges.push_back(Edge{NodeId{node_at[static_cast<std::size_t>(i)]}, NodeId{node_at[static_cast<std::size_t>(j)]}});
  }

  // Predictors eligible as children of E (and, non-exogenously, as parents).
  std::vector<std::uint32_t> child_pool;
  if (cfg.mode == EnvMode::Exogenous) {
    for (std::uint32_t k = 1; k <= static_cast<std::uint32_t>(d); ++k) child_pool.push_back(k);
  } else {
    // E sits between positions; X nodes at earlier positions may be parents.
    const int e_slot = static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));  // before position e_slot
    int env_parents = 0;
    for (int pos = 0; pos < m; ++pos) {
      const std::uint32_t v = node_at[static_cast<std::size_t>(pos)];
      if (v == static_cast<std::uint32_t>(d + 1)) continue;
      if (pos < e_slot) {
        if (rng.bernoulli(p)) {
          edges.push_back(Edge{NodeId{v}, NodeId{0}});
          ++env_parents;
        }
      } else {
        child_pool.push_back(v);
      }
    }
    if (env_parents == 0 || static_cast<int>(child_pool.size()) < n_int) return std::nullopt;
  }
  rng.shuffle(child_pool);
  for (int i = 0; i < n_int; ++i) {
    edges.push_back(Edge{NodeId{0}, NodeId{child_pool[static_cast<std::size_t>(i)]}});
  }

  // Exogenous construction is acyclic by design; non-exogenous too, since E's
  // parents precede its children in the order. Validation catches E not in AN_Y.
  if (cfg.mode == EnvMode::Exogenous) {
    Dag dag = Dag::from_edges(d, edges, EnvMode::Exogenous);
    if (!relatives(dag, dag.env(), Relation::Descendants).contains(dag.response())) return std::nullopt;
    return dag;
  }
  try {
    return Dag::from_edges(d, edges, EnvMode::NonExogenous);
  } catch (const ArgumentError&) {
    return std::nullopt;
  }
}

}  // namespace

Dag sample_dag(const GraphSamplerConfig& config, Rng& rng) {
  config.validate();
  for (std::uint64_t i = 0; i < config.max_attempts; ++i) {
    if (auto dag = attempt(config, rng)) return std::move(*dag);
  }
  throw SamplingError("no admissible DAG after " + std::to_string(config.max_attempts) + " attempts");
}

Dag sample_dag(const GraphSamplerConfig& config) {
  Rng rng(config.rng_seed);
  return sample_dag(config, rng);
}

std::size_t internal_edge_count(const Dag& dag) {
  std::size_t n = 0;
  for (const Edge& e : dag.edges()) {
    if (e.parent != dag.env() && e.child != dag.env()) ++n;
  }
  return n;
}

MaxCountResult simulate_max_mi_count(const GraphSamplerConfig& priors, std::size_t batches,
                                     std::optional<std::size_t> patience, Rng& rng) {
  if (batches < 1) throw ArgumentError("simulate_max_mi_count needs at least one batch");
  GraphSamplerConfig cfg = priors;
  cfg.response_last = true;
  EnumerationOptions opts;
  opts.backend = EnumerationBackend::Separators;
  MaxCountResult result;
  std::size_t since_improvement = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const Dag dag = sample_dag(cfg, rng);
    const std::size_t count = enumerate_minimally_invariant(dag, opts).size();
    ++result.draws;
    if (count > result.max_count) {
      result.max_count = count;
      since_improvement = 0;
    } else if (patience && ++since_improvement >= *patience) {
      result.stopped_early = true;
      break;
    }
  }
  return result;
}

}  // namespace ias
