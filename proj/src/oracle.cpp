#include "ias/oracle.hpp"

#include <algorithm>
#include <string>

#include <omp.h>

#include "ias/errors.hpp"

namespace ias {

namespace {

constexpr int kIcpBruteForceMaxD = 20;
constexpr int kIcpMbMaxSize = 25;

bool env_is_parent_of_response(const Dag& dag) { return dag.has_edge(dag.env(), dag.response()); }

void sort_canonical(std::vector<VarSet>& sets) { std::sort(sets.begin(), sets.end(), canonical_less); }

bool has_accepted_subset(const std::vector<VarSet>& accepted, const VarSet& s) {
  return std::any_of(accepted.begin(), accepted.end(), [&](const VarSet& a) { return a.is_subset_of(s); });
}

/// All k-subsets of `pool` in lexicographic order, minus supersets of `accepted`.
std::vector<VarSet> size_class(const std::vector<int>& pool, int k, const std::vector<VarSet>& accepted,
                               std::size_t& skipped) {
  std::vector<VarSet> out;
  const int n = static_cast<int>(pool.size());
  if (k > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    VarSet s;
    for (int i : idx) s.insert(pool[static_cast<std::size_t>(i)]);
    if (has_accepted_subset(accepted, s)) {
      ++skipped;
    } else {
      out.push_back(std::move(s));
    }
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

MinimalInvariantFamily enumerate_bruteforce(const Dag& dag, const EnumerationOptions& options) {
  MinimalInvariantFamily family;
  family.source_dag_fingerprint = dag.fingerprint();
  if (env_is_parent_of_response(dag)) return family;

  VarSet candidates = ancestors_of_response(dag);
  if (options.observed) candidates &= *options.observed;
  const std::vector<int> pool = candidates.to_vector();
  const int top = std::min(static_cast<int>(pool.size()), options.max_size.value_or(dag.d()));

  std::uint64_t queries = 0;
  std::vector<VarSet>& accepted = family.sets;
  const NodeId e = dag.env();
  const NodeId y = dag.response();
  DSeparation serial_query(dag);

  for (int k = 0; k <= top; ++k) {
    std::size_t skipped = 0;
    std::vector<VarSet> tests = size_class(pool, k, accepted, skipped);
    if (tests.empty()) break;  // every larger set is a superset of an accepted one

    const bool parallel = options.policy == ExecutionPolicy::Parallel && tests.size() > 1 &&
                          queries + tests.size() <= options.budget;
    std::vector<char> invariant(tests.size(), 0);
    if (parallel) {
#pragma omp parallel
      {
        DSeparation query(dag);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(tests.size()); ++i) {
          invariant[static_cast<std::size_t>(i)] = query.separated(e, y, tests[static_cast<std::size_t>(i)]) ? 1 : 0;
        }
      }
      queries += tests.size();
    } else {
      for (std::size_t i = 0; i < tests.size(); ++i) {
        if (queries >= options.budget) {
          sort_canonical(accepted);
          throw BudgetExceeded(options.budget, family);
        }
        ++queries;
        invariant[i] = serial_query.separated(e, y, tests[i]) ? 1 : 0;
      }
    }
    // Sets of equal size are incomparable, so acceptance order within a class
    // does not matter; keep it lexicographic anyway.
    for (std::size_t i = 0; i < tests.size(); ++i) {
      if (invariant[i]) accepted.push_back(std::move(tests[i]));
    }
  }
  sort_canonical(accepted);
  return family;
}

MinimalInvariantFamily enumerate_separators(const Dag& dag, const EnumerationOptions& options) {
  MinimalInvariantStream stream(dag, options);
  MinimalInvariantFamily family;
  family.source_dag_fingerprint = dag.fingerprint();
  while (auto s = stream.next()) family.sets.push_back(std::move(*s));
  sort_canonical(family.sets);
  return family;
}

}  // namespace

// ---------------------------------------------------------------- family

VarSet MinimalInvariantFamily::union_all() const {
  VarSet u;
  for (const auto& s : sets) u |= s;
  return u;
}

VarSet MinimalInvariantFamily::union_up_to(int m) const {
  VarSet u;
  for (const auto& s : sets) {
    if (s.size() <= m) u |= s;
  }
  return u;
}

std::optional<int> MinimalInvariantFamily::min_size() const {
  if (sets.empty()) return std::nullopt;
  int best = sets.front().size();
  for (const auto& s : sets) best = std::min(best, s.size());
  return best;
}

std::optional<int> MinimalInvariantFamily::max_size() const {
  if (sets.empty()) return std::nullopt;
  int best = 0;
  for (const auto& s : sets) best = std::max(best, s.size());
  return best;
}

BudgetExceeded::BudgetExceeded(std::uint64_t budget, MinimalInvariantFamily partial)
    : std::runtime_error("enumeration budget of " + std::to_string(budget) + " queries exceeded after " +
                         std::to_string(partial.sets.size()) + " sets"),
      partial_(std::move(partial)) {}

// ---------------------------------------------------------------- stream

MinimalInvariantStream::MinimalInvariantStream(const Dag& dag, const EnumerationOptions& options)
    : moral_(moral_ancestral_graph(dag, dag.env(), dag.response())),
      budget_(options.budget),
      fingerprint_(dag.fingerprint()) {
  const auto n = static_cast<std::size_t>(moral_.graph.vertex_count());
  std::vector<bool> allowed(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    const NodeId node = moral_.node_of[v];
    if (dag.role(node) != NodeRole::Predictor) continue;
    allowed[v] = !options.observed || options.observed->contains(static_cast<int>(node.index));
  }
  stream_ = std::make_unique<MinimalSeparatorStream>(moral_.graph, moral_.vertex(dag.env()),
                                                     moral_.vertex(dag.response()), std::move(allowed),
                                                     options.max_size);
}

std::optional<VarSet> MinimalInvariantStream::next() {
  auto separator = stream_->next();
  if (stream_->work() > budget_) {
    MinimalInvariantFamily partial;
    partial.sets = found_;
    partial.source_dag_fingerprint = fingerprint_;
    sort_canonical(partial.sets);
    throw BudgetExceeded(budget_, std::move(partial));
  }
  if (!separator) return std::nullopt;
  VarSet s;
  for (int v : *separator) s.insert(static_cast<int>(moral_.node_of[static_cast<std::size_t>(v)].index));
  found_.push_back(s);
  return s;
}

// ---------------------------------------------------------------- oracles

bool oracle_invariant(const Dag& dag, const VarSet& s) { return d_separated(dag, dag.env(), dag.response(), s); }

bool oracle_minimally_invariant(const Dag& dag, const VarSet& s) {
  DSeparation query(dag);
  if (!query.separated(dag.env(), dag.response(), s)) return false;
  bool minimal = true;
  s.for_each([&](int k) {
    if (!minimal) return;
    VarSet reduced = s;
    reduced.erase(k);
    if (query.separated(dag.env(), dag.response(), reduced)) minimal = false;
  });
  return minimal;
}

MinimalInvariantFamily enumerate_minimally_invariant(const Dag& dag, const EnumerationOptions& options) {
  EnumerationBackend backend = options.backend;
  if (backend == EnumerationBackend::Auto) {
    backend = options.max_size && *options.max_size <= 2 ? EnumerationBackend::BruteForce
                                                         : EnumerationBackend::Separators;
  }
  return backend == EnumerationBackend::BruteForce ? enumerate_bruteforce(dag, options)
                                                   : enumerate_separators(dag, options);
}

VarSet oracle_s_as(const Dag& dag, std::optional<int> max_size, const EnumerationOptions& options) {
  EnumerationOptions opts = options;
  if (max_size) opts.max_size = max_size;
  return enumerate_minimally_invariant(dag, opts).union_all();
}

VarSet ancestors_of_response(const Dag& dag) {
  return relatives(dag, dag.response(), Relation::Ancestors).predictors(dag.d());
}

VarSet oracle_s_icp(const Dag& dag) {
  if (dag.mode() != EnvMode::Exogenous || env_is_parent_of_response(dag)) return oracle_s_icp_bruteforce(dag);
  const int d = dag.d();
  const VarSet pa_y = relatives(dag, dag.response(), Relation::Parents).predictors(d);
  const VarSet ch_e = relatives(dag, dag.env(), Relation::Children).predictors(d);
  const VarSet an_y = ancestors_of_response(dag);
  VarSet parents_of_hit;
  (an_y & ch_e).for_each([&](int k) {
    for (auto p : dag.parents(dag.predictor(k))) {
      if (dag.role(NodeId{p}) == NodeRole::Predictor) parents_of_hit.insert(static_cast<int>(p));
    }
  });
  return pa_y & (ch_e | parents_of_hit);
}

VarSet oracle_s_icp_bruteforce(const Dag& dag, ExecutionPolicy policy) {
  const int d = dag.d();
  if (d > kIcpBruteForceMaxD) {
    throw ResourceError("exhaustive S_ICP needs d <= " + std::to_string(kIcpBruteForceMaxD) + ", got " +
                        std::to_string(d));
  }
  const std::uint64_t total = std::uint64_t{1} << d;
  const NodeId e = dag.env();
  const NodeId y = dag.response();
  std::uint64_t meet = total - 1;
  bool any = false;
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel
    {
      DSeparation query(dag);
      std::uint64_t local = total - 1;
      bool local_any = false;
#pragma omp for schedule(static)
      for (std::int64_t mask = 0; mask < static_cast<std::int64_t>(total); ++mask) {
        if (query.separated(e, y, VarSet::from_mask(static_cast<std::uint64_t>(mask)))) {
          local &= static_cast<std::uint64_t>(mask);
          local_any = true;
        }
      }
#pragma omp critical
      {
        meet &= local;
        any = any || local_any;
      }
    }
  } else {
    DSeparation query(dag);
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      if (query.separated(e, y, VarSet::from_mask(mask))) {
        meet &= mask;
        any = true;
        if (meet == 0) break;
      }
    }
  }
  return any ? VarSet::from_mask(meet) : VarSet{};
}

VarSet oracle_markov_boundary(const Dag& dag) {
  const int d = dag.d();
  const NodeId y = dag.response();
  NodeSet mb = relatives(dag, y, Relation::Parents);
  for (auto c : dag.children(y)) {
    mb.insert(NodeId{c});
    for (auto p : dag.parents(NodeId{c})) mb.insert(NodeId{p});
  }
  return mb.predictors(d);
}

VarSet oracle_s_icp_mb(const Dag& dag) {
  const std::vector<int> mb = oracle_markov_boundary(dag).to_vector();
  if (static_cast<int>(mb.size()) > kIcpMbMaxSize) {
    throw ResourceError("|MB_Y| = " + std::to_string(mb.size()) + " exceeds the enumeration guard of " +
                        std::to_string(kIcpMbMaxSize));
  }
  DSeparation query(dag);
  const std::uint64_t total = std::uint64_t{1} << mb.size();
  VarSet meet;
  bool any = false;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    VarSet s;
    for (std::size_t i = 0; i < mb.size(); ++i) {
      if ((mask >> i) & 1U) s.insert(mb[i]);
    }
    if (query.separated(dag.env(), dag.response(), s)) {
      meet = any ? (meet & s) : s;
      any = true;
      if (meet.empty()) break;
    }
  }
  return any ? meet : VarSet{};
}

}  // namespace ias
