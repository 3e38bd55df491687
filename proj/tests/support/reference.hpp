#pragma once

// Slow, independent references used by the tests. Nothing here shares code
// with the library beyond the Dag container.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "ias/dag.hpp"
#include "ias/varset.hpp"

namespace ias::ref {

inline std::vector<std::vector<int>> parent_lists(const Dag& dag) {
  std::vector<std::vector<int>> pa(dag.node_count());
  for (const Edge& e : dag.edges()) pa[e.child.index].push_back(static_cast<int>(e.parent.index));
  return pa;
}

inline std::vector<bool> ancestors_incl(const Dag& dag, const std::vector<int>& seeds) {
  const auto pa = parent_lists(dag);
  std::vector<bool> mark(dag.node_count(), false);
  std::vector<int> todo(seeds);
  while (!todo.empty()) {
    const int v = todo.back();
    todo.pop_back();
    if (mark[static_cast<std::size_t>(v)]) continue;
    mark[static_cast<std::size_t>(v)] = true;
    for (int p : pa[static_cast<std::size_t>(v)]) todo.push_back(p);
  }
  return mark;
}

// d-separation by enumerating every simple path of the skeleton and applying
// the blocking rules node by node.
inline bool d_separated_paths(const Dag& dag, int a, int b, const VarSet& z) {
  const std::size_t n = dag.node_count();
  std::vector<std::vector<int>> nbr(n);
  for (const Edge& e : dag.edges()) {
    nbr[e.parent.index].push_back(static_cast<int>(e.child.index));
    nbr[e.child.index].push_back(static_cast<int>(e.parent.index));
  }
  std::vector<int> zs;
  z.for_each([&](int k) { zs.push_back(k); });
  const auto anc_z = ancestors_incl(dag, zs);
  auto edge = [&](int u, int v) { return dag.has_edge(NodeId{static_cast<std::uint32_t>(u)}, NodeId{static_cast<std::uint32_t>(v)}); };

  std::vector<int> path{a};
  std::vector<bool> on_path(n, false);
  on_path[static_cast<std::size_t>(a)] = true;
  bool open_found = false;
  std::function<void()> dfs = [&] {
    if (open_found) return;
    const int u = path.back();
    if (u == b) {
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        const int prev = path[i - 1], mid = path[i], next = path[i + 1];
        const bool collider = edge(prev, mid) && edge(next, mid);
        const bool in_z = mid >= 1 && mid <= dag.d() && z.contains(mid);
        if (collider ? !anc_z[static_cast<std::size_t>(mid)] : in_z) return;
      }
      open_found = true;
      return;
    }
    for (int v : nbr[static_cast<std::size_t>(u)]) {
      if (on_path[static_cast<std::size_t>(v)]) continue;
      on_path[static_cast<std::size_t>(v)] = true;
      path.push_back(v);
      dfs();
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = false;
    }
  };
  dfs();
  return !open_found;
}

// Minimally invariant sets by checking every subset of the allowed
// predictors against the one-step criterion. `sep` decides invariance.
inline std::vector<VarSet> minimal_invariant_bruteforce(int d, const std::function<bool(const VarSet&)>& sep,
                                                        const VarSet& allowed, int max_size) {
  std::vector<int> pool = allowed.to_vector();
  std::vector<VarSet> out;
  const std::uint64_t total = std::uint64_t{1} << pool.size();
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    VarSet s;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (mask >> i & 1U) s.insert(pool[i]);
    }
    if (s.size() > max_size || !sep(s)) continue;
    bool minimal = true;
    s.for_each([&](int j) {
      VarSet t = s;
      t.erase(j);
      if (sep(t)) minimal = false;
    });
    if (minimal) out.push_back(s);
  }
  (void)d;
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

inline std::vector<VarSet> minimal_invariant_paths(const Dag& dag, int max_size = 1 << 20) {
  const int y = dag.d() + 1;
  return minimal_invariant_bruteforce(
      dag.d(), [&](const VarSet& s) { return d_separated_paths(dag, 0, y, s); }, VarSet::range(1, dag.d()), max_size);
}

inline VarSet union_of(const std::vector<VarSet>& family) {
  VarSet u;
  for (const auto& s : family) u |= s;
  return u;
}

}  // namespace ias::ref
