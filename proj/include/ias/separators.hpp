#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ias/dag.hpp"

namespace ias {

/// Lists the minimal (a, b)-vertex separators of an undirected graph whose
/// vertices all lie in an allowed set, with polynomial delay.
///
/// Each search node is a pair (A, I): A is a connected vertex set containing
/// a that every listed separator must leave on a's side, and I are vertices
/// every listed separator must contain. The separator closest to A,
///   S(A) = N(D),  D = component of b in G - N[A],
/// is emitted at the node. Any other separator in the node's range misses
/// some v in S(A); ordering S(A) \ I as v_1..v_k, the children are
///   (A + v_i, I + {v_1..v_{i-1}})
/// which partition the remaining range. A child is non-empty iff its I is
/// contained in its own closest separator, so every visited node emits and
/// the delay between outputs is O(|V| (|V| + |E|)).
///
/// Vertices outside the allowed set can never be separator members; they are
/// absorbed into A whenever they touch it.
class MinimalSeparatorStream {
 public:
  MinimalSeparatorStream(const UndirectedGraph& graph, int a, int b, std::vector<bool> allowed,
                         std::optional<int> max_size = std::nullopt);

  /// Next separator (sorted vertex list), or nullopt when exhausted.
  std::optional<std::vector<int>> next();

  /// Number of closest-separator computations so far.
  std::uint64_t work() const { return work_; }

 private:
  struct Frame {
    std::vector<bool> side;        // A
    std::vector<int> forced;       // I, sorted
    std::vector<int> separator;    // S(A), sorted
    std::vector<int> branch;       // S(A) \ I in branching order
    std::size_t next_branch = 0;
    bool emitted = false;
  };

  /// Absorbs non-allowed neighbours into `side`; false if b becomes adjacent.
  bool close_side(std::vector<bool>& side) const;
  std::vector<int> closest_separator(const std::vector<bool>& side);
  bool make_frame(std::vector<bool> side, std::vector<int> forced, Frame& out);

  const UndirectedGraph* graph_;
  int a_;
  int b_;
  std::vector<bool> allowed_;
  std::optional<int> max_size_;
  std::vector<Frame> stack_;
  std::uint64_t work_ = 0;
};

}  // namespace ias
