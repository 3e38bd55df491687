#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ias/varset.hpp"

namespace ias {

/// Node of a graph over (E, X_1..X_d, Y): index 0 is E, 1..d are the
/// predictors and d + 1 is Y.
struct NodeId {
  std::uint32_t index = 0;
  auto operator<=>(const NodeId&) const = default;
};

enum class NodeRole { Env, Predictor, Response };

/// Exogenous: E has no parents. NonExogenous: E may have parents but must be
/// an ancestor of Y.
enum class EnvMode { Exogenous, NonExogenous };

struct Edge {
  NodeId parent;
  NodeId child;
  auto operator<=>(const Edge&) const = default;
};

/// Fixed-universe bitmask over node indices.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  void insert(NodeId v) { words_[v.index / 64] |= std::uint64_t{1} << (v.index % 64); }
  void erase(NodeId v) { words_[v.index / 64] &= ~(std::uint64_t{1} << (v.index % 64)); }
  bool contains(NodeId v) const {
    return v.index < universe_ && ((words_[v.index / 64] >> (v.index % 64)) & 1U);
  }
  std::size_t size() const;
  bool empty() const { return size() == 0; }
  std::size_t universe() const { return universe_; }
  std::vector<NodeId> to_vector() const;
  /// Members that are predictors, as a VarSet (E and Y are dropped).
  VarSet predictors(int d) const;

  NodeSet& operator|=(const NodeSet& other);
  NodeSet& operator&=(const NodeSet& other);
  bool operator==(const NodeSet& other) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Relation { Parents, Children, Ancestors, Descendants };

/// Immutable DAG over (E, X, Y). Acyclicity and the environment-mode
/// constraints are checked at construction; a topological order is cached.
///
/// Adjacency lists are always kept. Graphs with |edges| / |nodes|^2 >= 0.25
/// also keep a bit matrix so has_edge is O(1); sparse graphs binary-search
/// the sorted child list instead.
class Dag {
 public:
  static Dag from_edges(int d, std::span<const Edge> edges, EnvMode mode = EnvMode::Exogenous);

  int d() const { return d_; }
  std::size_t node_count() const { return static_cast<std::size_t>(d_) + 2; }
  EnvMode mode() const { return mode_; }

  NodeId env() const { return NodeId{0}; }
  NodeId response() const { return NodeId{static_cast<std::uint32_t>(d_ + 1)}; }
  NodeId predictor(int k) const;
  NodeRole role(NodeId v) const;
  bool contains(NodeId v) const { return v.index < node_count(); }
  /// "E", "X3", "Y".
  std::string name(NodeId v) const;

  std::span<const std::uint32_t> parents(NodeId v) const { return parents_[v.index]; }
  std::span<const std::uint32_t> children(NodeId v) const { return children_[v.index]; }
  bool has_edge(NodeId parent, NodeId child) const;
  std::size_t edge_count() const { return edge_count_; }
  std::vector<Edge> edges() const;
  std::span<const std::uint32_t> topological_order() const { return topo_; }
  bool dense_storage() const { return !matrix_.empty(); }

  /// Stable 64-bit hash of (d, mode, edge set).
  std::uint64_t fingerprint() const { return fingerprint_; }

 private:
  Dag() = default;

  int d_ = 0;
  EnvMode mode_ = EnvMode::Exogenous;
  std::vector<std::vector<std::uint32_t>> parents_;
  std::vector<std::vector<std::uint32_t>> children_;
  std::vector<std::uint64_t> matrix_;  // row-major bit matrix, dense graphs only
  std::vector<std::uint32_t> topo_;
  std::size_t edge_count_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Parents, children, ancestors or descendants of `node` (never the node itself).
NodeSet relatives(const Dag& dag, NodeId node, Relation kind);

/// Ancestors of every member of `seeds`, including the seeds themselves.
NodeSet ancestral_closure(const Dag& dag, const NodeSet& seeds);

/// Reusable Bayes-ball d-separation query with per-instance scratch buffers.
/// Not thread-safe; give each worker its own instance.
class DSeparation {
 public:
  explicit DSeparation(const Dag& dag);

  /// True iff every path between a and b is blocked given the predictors in s.
  bool separated(NodeId a, NodeId b, const VarSet& s);
  /// Nodes reachable from `source` along active trails given s.
  NodeSet reachable(NodeId source, const VarSet& s);

 private:
  bool run(NodeId source, const VarSet& s, std::int64_t target);

  const Dag* dag_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> in_z_;
  std::vector<std::uint32_t> anc_z_;
  std::vector<std::uint32_t> seen_up_;
  std::vector<std::uint32_t> seen_down_;
  std::vector<std::uint32_t> reached_;
  std::vector<std::uint32_t> stack_;
};

/// Precondition: a != b, neither in s. Throws ArgumentError otherwise.
bool d_separated(const Dag& dag, NodeId a, NodeId b, const VarSet& s);

/// Simple undirected graph on vertices 0..n-1 with sorted adjacency lists.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int vertex_count = 0) : adj_(static_cast<std::size_t>(vertex_count)) {}

  void add_edge(int u, int v);
  bool adjacent(int u, int v) const;
  std::span<const int> neighbors(int u) const { return adj_[static_cast<std::size_t>(u)]; }
  int vertex_count() const { return static_cast<int>(adj_.size()); }
  std::size_t edge_count() const;
  /// True iff no path connects a and b avoiding vertices flagged in `removed`.
  bool separated(int a, int b, const std::vector<bool>& removed) const;

 private:
  std::vector<std::vector<int>> adj_;
};

/// Moralized ancestral graph together with the vertex <-> node mapping.
struct MoralGraph {
  UndirectedGraph graph;
  std::vector<NodeId> node_of;   // vertex -> node
  std::vector<int> vertex_of;    // node index -> vertex, -1 when outside the ancestral set

  int vertex(NodeId v) const { return vertex_of[v.index]; }
};

/// Induced subgraph on An({a, b} u conditioning) including the seeds, with
/// co-parents married and directions dropped.
MoralGraph moral_ancestral_graph(const Dag& dag, NodeId a, NodeId b, const VarSet& conditioning = {});

}  // namespace ias
