#include "ias/dag.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <queue>
#include <string>

#include "ias/errors.hpp"
#include "ias/rng.hpp"

namespace ias {

// ---------------------------------------------------------------- NodeSet

std::size_t NodeSet::size() const {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

std::vector<NodeId> NodeSet::to_vector() const {
  std::vector<NodeId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t word = words_[w];
    while (word != 0) {
      out.push_back(NodeId{static_cast<std::uint32_t>(64 * w + std::countr_zero(word))});
      word &= word - 1;
    }
  }
  return out;
}

VarSet NodeSet::predictors(int d) const {
  VarSet s;
  for (NodeId v : to_vector()) {
    if (v.index >= 1 && v.index <= static_cast<std::uint32_t>(d)) s.insert(static_cast<int>(v.index));
  }
  return s;
}

NodeSet& NodeSet::operator|=(const NodeSet& other) {
  if (other.universe_ != universe_) throw ArgumentError("NodeSet universes differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

NodeSet& NodeSet::operator&=(const NodeSet& other) {
  if (other.universe_ != universe_) throw ArgumentError("NodeSet universes differ");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

// ---------------------------------------------------------------- Dag

namespace {

constexpr double kDenseThreshold = 0.25;

}  // namespace

Dag Dag::from_edges(int d, std::span<const Edge> edges, EnvMode mode) {
  if (d < 0) throw ArgumentError("predictor count must be non-negative");
  Dag g;
  g.d_ = d;
  g.mode_ = mode;
  const std::size_t n = g.node_count();
  g.parents_.assign(n, {});
  g.children_.assign(n, {});

  std::vector<Edge> sorted(edges.begin(), edges.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const Edge& e = sorted[i];
    if (e.parent.index >= n || e.child.index >= n) throw ArgumentError("edge references an unknown node");
    if (e.parent == e.child) throw ArgumentError("self loop on " + g.name(e.parent));
    if (i > 0 && sorted[i - 1] == e) {
      throw ArgumentError("duplicate edge " + g.name(e.parent) + " -> " + g.name(e.child));
    }
    g.children_[e.parent.index].push_back(e.child.index);
    g.parents_[e.child.index].push_back(e.parent.index);
  }
  for (auto& p : g.parents_) std::sort(p.begin(), p.end());
  g.edge_count_ = sorted.size();

  // Kahn's algorithm; lowest index first so the cached order is canonical.
  std::vector<std::size_t> indegree(n);
  for (std::size_t v = 0; v < n; ++v) indegree[v] = g.parents_[v].size();
  std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(static_cast<std::uint32_t>(v));
  }
  while (!ready.empty()) {
    const std::uint32_t v = ready.top();
    ready.pop();
    g.topo_.push_back(v);
    for (auto c : g.children_[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (g.topo_.size() != n) throw ArgumentError("graph contains a directed cycle");

  if (mode == EnvMode::Exogenous) {
    if (!g.parents_[0].empty()) throw ArgumentError("E has parents but the graph is in exogenous mode");
  } else {
    if (!relatives(g, g.env(), Relation::Descendants).contains(g.response())) {
      throw ArgumentError("non-exogenous mode requires E to be an ancestor of Y");
    }
  }

  const double density = static_cast<double>(g.edge_count_) / static_cast<double>(n * n);
  if (density >= kDenseThreshold) {
    const std::size_t words = (n * n + 63) / 64;
    g.matrix_.assign(words, 0);
    for (const Edge& e : sorted) {
      const std::size_t bit = e.parent.index * n + e.child.index;
      g.matrix_[bit / 64] |= std::uint64_t{1} << (bit % 64);
    }
  }

  std::uint64_t h = Rng::mix64(static_cast<std::uint64_t>(d) * 2 + (mode == EnvMode::Exogenous ? 0 : 1));
  for (const Edge& e : sorted) {
    h = Rng::mix64(h ^ ((static_cast<std::uint64_t>(e.parent.index) << 32) | e.child.index));
  }
  g.fingerprint_ = h;
  return g;
}

NodeId Dag::predictor(int k) const {
  if (k < 1 || k > d_) throw ArgumentError("predictor index out of range: " + std::to_string(k));
  return NodeId{static_cast<std::uint32_t>(k)};
}

NodeRole Dag::role(NodeId v) const {
  if (!contains(v)) throw ArgumentError("unknown node index " + std::to_string(v.index));
  if (v.index == 0) return NodeRole::Env;
  if (v.index == static_cast<std::uint32_t>(d_ + 1)) return NodeRole::Response;
  return NodeRole::Predictor;
}

std::string Dag::name(NodeId v) const {
  if (v.index == 0) return "E";
  if (v.index == static_cast<std::uint32_t>(d_ + 1)) return "Y";
  return "X" + std::to_string(v.index);
}

bool Dag::has_edge(NodeId parent, NodeId child) const {
  if (!contains(parent) || !contains(child)) return false;
  if (!matrix_.empty()) {
    const std::size_t bit = parent.index * node_count() + child.index;
    return (matrix_[bit / 64] >> (bit % 64)) & 1U;
  }
  const auto& ps = parents_[child.index];
  return std::binary_search(ps.begin(), ps.end(), parent.index);
}

std::vector<Edge> Dag::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (std::uint32_t v = 0; v < node_count(); ++v) {
    for (auto c : children_[v]) out.push_back(Edge{NodeId{v}, NodeId{c}});
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------- relatives

NodeSet relatives(const Dag& dag, NodeId node, Relation kind) {
  if (!dag.contains(node)) throw ArgumentError("unknown node index " + std::to_string(node.index));
  NodeSet out(dag.node_count());
  switch (kind) {
    case Relation::Parents:
      for (auto p : dag.parents(node)) out.insert(NodeId{p});
      return out;
    case Relation::Children:
      for (auto c : dag.children(node)) out.insert(NodeId{c});
      return out;
    case Relation::Ancestors:
    case Relation::Descendants: {
      const bool up = kind == Relation::Ancestors;
      std::vector<std::uint32_t> stack{node.index};
      while (!stack.empty()) {
        const NodeId v{stack.back()};
        stack.pop_back();
        for (auto w : up ? dag.parents(v) : dag.children(v)) {
          if (!out.contains(NodeId{w})) {
            out.insert(NodeId{w});
            stack.push_back(w);
          }
        }
      }
      return out;
    }
  }
  return out;
}

NodeSet ancestral_closure(const Dag& dag, const NodeSet& seeds) {
  NodeSet out = seeds;
  std::vector<NodeId> stack = seeds.to_vector();
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (auto p : dag.parents(v)) {
      if (!out.contains(NodeId{p})) {
        out.insert(NodeId{p});
        stack.push_back(NodeId{p});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------- d-separation

DSeparation::DSeparation(const Dag& dag)
    : dag_(&dag),
      in_z_(dag.node_count(), 0),
      anc_z_(dag.node_count(), 0),
      seen_up_(dag.node_count(), 0),
      seen_down_(dag.node_count(), 0),
      reached_(dag.node_count(), 0) {}

bool DSeparation::run(NodeId source, const VarSet& s, std::int64_t target) {
  if (++epoch_ == 0) {
    std::fill(in_z_.begin(), in_z_.end(), 0);
    std::fill(anc_z_.begin(), anc_z_.end(), 0);
    std::fill(seen_up_.begin(), seen_up_.end(), 0);
    std::fill(seen_down_.begin(), seen_down_.end(), 0);
    std::fill(reached_.begin(), reached_.end(), 0);
    epoch_ = 1;
  }
  const std::uint32_t ep = epoch_;
  const Dag& g = *dag_;

  // Z and its ancestors (colliders in An(Z) are open).
  stack_.clear();
  s.for_each([&](int k) {
    if (k > g.d()) throw ArgumentError("conditioning set member X" + std::to_string(k) + " exceeds d");
    in_z_[static_cast<std::size_t>(k)] = ep;
    anc_z_[static_cast<std::size_t>(k)] = ep;
    stack_.push_back(static_cast<std::uint32_t>(k));
  });
  while (!stack_.empty()) {
    const std::uint32_t v = stack_.back();
    stack_.pop_back();
    for (auto p : g.parents(NodeId{v})) {
      if (anc_z_[p] != ep) {
        anc_z_[p] = ep;
        stack_.push_back(p);
      }
    }
  }

  // Entries encode (node << 1) | direction; direction 0 = arrived from a
  // child (moving up), 1 = arrived from a parent (moving down).
  stack_.clear();
  stack_.push_back(source.index << 1);
  while (!stack_.empty()) {
    const std::uint32_t entry = stack_.back();
    stack_.pop_back();
    const std::uint32_t v = entry >> 1;
    const bool down = (entry & 1U) != 0;
    const bool observed = in_z_[v] == ep;
    if (down) {
      if (seen_down_[v] == ep) continue;
      seen_down_[v] = ep;
      if (!observed) {
        reached_[v] = ep;
        if (static_cast<std::int64_t>(v) == target) return true;
        for (auto c : g.children(NodeId{v})) stack_.push_back((c << 1) | 1U);
      }
      if (anc_z_[v] == ep) {
        for (auto p : g.parents(NodeId{v})) stack_.push_back(p << 1);
      }
    } else {
      if (seen_up_[v] == ep) continue;
      seen_up_[v] = ep;
      if (observed) continue;
      reached_[v] = ep;
      if (static_cast<std::int64_t>(v) == target) return true;
      for (auto p : g.parents(NodeId{v})) stack_.push_back(p << 1);
      for (auto c : g.children(NodeId{v})) stack_.push_back((c << 1) | 1U);
    }
  }
  return false;
}

bool DSeparation::separated(NodeId a, NodeId b, const VarSet& s) {
  return !run(a, s, static_cast<std::int64_t>(b.index));
}

NodeSet DSeparation::reachable(NodeId source, const VarSet& s) {
  run(source, s, -1);
  NodeSet out(dag_->node_count());
  for (std::uint32_t v = 0; v < dag_->node_count(); ++v) {
    if (reached_[v] == epoch_ && v != source.index) out.insert(NodeId{v});
  }
  return out;
}

bool d_separated(const Dag& dag, NodeId a, NodeId b, const VarSet& s) {
  if (!dag.contains(a) || !dag.contains(b)) throw ArgumentError("unknown node in d-separation query");
  if (a == b) throw ArgumentError("d-separation query needs two distinct nodes");
  if (dag.role(a) == NodeRole::Predictor && s.contains(static_cast<int>(a.index))) {
    throw ArgumentError("query node is in the conditioning set");
  }
  if (dag.role(b) == NodeRole::Predictor && s.contains(static_cast<int>(b.index))) {
    throw ArgumentError("query node is in the conditioning set");
  }
  DSeparation query(dag);
  return query.separated(a, b, s);
}

// ---------------------------------------------------------------- undirected

void UndirectedGraph::add_edge(int u, int v) {
  if (u == v) return;
  auto insert_sorted = [](std::vector<int>& list, int x) {
    auto it = std::lower_bound(list.begin(), list.end(), x);
    if (it == list.end() || *it != x) list.insert(it, x);
  };
  insert_sorted(adj_[static_cast<std::size_t>(u)], v);
  insert_sorted(adj_[static_cast<std::size_t>(v)], u);
}

bool UndirectedGraph::adjacent(int u, int v) const {
  const auto& list = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(list.begin(), list.end(), v);
}

std::size_t UndirectedGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& list : adj_) n += list.size();
  return n / 2;
}

bool UndirectedGraph::separated(int a, int b, const std::vector<bool>& removed) const {
  std::vector<bool> seen(adj_.size(), false);
  std::vector<int> stack{a};
  seen[static_cast<std::size_t>(a)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == b) return false;
    for (int w : neighbors(v)) {
      const auto wi = static_cast<std::size_t>(w);
      if (!seen[wi] && !removed[wi]) {
        seen[wi] = true;
        stack.push_back(w);
      }
    }
  }
  return true;
}

MoralGraph moral_ancestral_graph(const Dag& dag, NodeId a, NodeId b, const VarSet& conditioning) {
  if (!dag.contains(a) || !dag.contains(b)) throw ArgumentError("unknown node in moralization query");
  if (a == b) throw ArgumentError("moralization query needs two distinct nodes");
  NodeSet seeds(dag.node_count());
  seeds.insert(a);
  seeds.insert(b);
  conditioning.for_each([&](int k) { seeds.insert(dag.predictor(k)); });
  const NodeSet keep = ancestral_closure(dag, seeds);

  MoralGraph m;
  m.vertex_of.assign(dag.node_count(), -1);
  for (NodeId v : keep.to_vector()) {
    m.vertex_of[v.index] = static_cast<int>(m.node_of.size());
    m.node_of.push_back(v);
  }
  m.graph = UndirectedGraph(static_cast<int>(m.node_of.size()));
  for (NodeId v : m.node_of) {
    const auto ps = dag.parents(v);
    const int vv = m.vertex(v);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const int pi = m.vertex_of[ps[i]];
      m.graph.add_edge(pi, vv);
      for (std::size_t j = i + 1; j < ps.size(); ++j) m.graph.add_edge(pi, m.vertex_of[ps[j]]);
    }
  }
  return m;
}

}  // namespace ias
