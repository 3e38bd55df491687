#include "ias/separators.hpp"

#include <algorithm>

#include "ias/errors.hpp"

namespace ias {

MinimalSeparatorStream::MinimalSeparatorStream(const UndirectedGraph& graph, int a, int b, std::vector<bool> allowed,
                                               std::optional<int> max_size)
    : graph_(&graph), a_(a), b_(b), allowed_(std::move(allowed)), max_size_(max_size) {
  const auto n = static_cast<std::size_t>(graph.vertex_count());
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n || a == b) {
    throw ArgumentError("separator enumeration needs two distinct vertices of the graph");
  }
  if (allowed_.size() != n) throw ArgumentError("allowed mask has the wrong size");
  allowed_[static_cast<std::size_t>(a)] = false;
  allowed_[static_cast<std::size_t>(b)] = false;
  if (graph.adjacent(a, b)) return;

  std::vector<bool> side(n, false);
  side[static_cast<std::size_t>(a)] = true;
  Frame root;
  if (make_frame(std::move(side), {}, root)) stack_.push_back(std::move(root));
}

bool MinimalSeparatorStream::close_side(std::vector<bool>& side) const {
  std::vector<int> stack;
  for (int v = 0; v < graph_->vertex_count(); ++v) {
    if (side[static_cast<std::size_t>(v)]) stack.push_back(v);
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : graph_->neighbors(v)) {
      if (w == b_) return false;
      const auto wi = static_cast<std::size_t>(w);
      if (!side[wi] && !allowed_[wi]) {
        side[wi] = true;
        stack.push_back(w);
      }
    }
  }
  return true;
}

std::vector<int> MinimalSeparatorStream::closest_separator(const std::vector<bool>& side) {
  ++work_;
  const auto n = static_cast<std::size_t>(graph_->vertex_count());
  // blocked = N[A]
  std::vector<bool> blocked = side;
  for (std::size_t v = 0; v < n; ++v) {
    if (!side[v]) continue;
    for (int w : graph_->neighbors(static_cast<int>(v))) blocked[static_cast<std::size_t>(w)] = true;
  }
  // D = component of b in G - N[A]; S = N(D) lies inside N(A).
  std::vector<bool> in_d(n, false);
  std::vector<bool> in_s(n, false);
  std::vector<int> stack{b_};
  in_d[static_cast<std::size_t>(b_)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : graph_->neighbors(v)) {
      const auto wi = static_cast<std::size_t>(w);
      if (blocked[wi]) {
        in_s[wi] = true;
      } else if (!in_d[wi]) {
        in_d[wi] = true;
        stack.push_back(w);
      }
    }
  }
  std::vector<int> separator;
  for (std::size_t v = 0; v < n; ++v) {
    if (in_s[v]) separator.push_back(static_cast<int>(v));
  }
  return separator;
}

bool MinimalSeparatorStream::make_frame(std::vector<bool> side, std::vector<int> forced, Frame& out) {
  if (!close_side(side)) return false;
  std::vector<int> separator = closest_separator(side);
  if (!std::includes(separator.begin(), separator.end(), forced.begin(), forced.end())) return false;
  out.branch.clear();
  std::set_difference(separator.begin(), separator.end(), forced.begin(), forced.end(), std::back_inserter(out.branch));
  out.side = std::move(side);
  out.forced = std::move(forced);
  out.separator = std::move(separator);
  out.next_branch = 0;
  out.emitted = false;
  return true;
}

std::optional<std::vector<int>> MinimalSeparatorStream::next() {
  while (!stack_.empty()) {
    Frame& top = stack_.back();
    if (!top.emitted) {
      top.emitted = true;
      if (!max_size_ || static_cast<int>(top.separator.size()) <= *max_size_) return top.separator;
      continue;
    }
    bool pushed = false;
    while (top.next_branch < top.branch.size()) {
      const std::size_t i = top.next_branch++;
      // Every separator below this child contains forced + branch[0..i).
      if (max_size_ && static_cast<int>(top.forced.size() + i) > *max_size_) {
        top.next_branch = top.branch.size();
        break;
      }
      std::vector<bool> side = top.side;
      side[static_cast<std::size_t>(top.branch[i])] = true;
      std::vector<int> forced = top.forced;
      forced.insert(forced.end(), top.branch.begin(), top.branch.begin() + static_cast<std::ptrdiff_t>(i));
      std::sort(forced.begin(), forced.end());
      Frame child;
      if (make_frame(std::move(side), std::move(forced), child)) {
        stack_.push_back(std::move(child));  // invalidates `top`
        pushed = true;
        break;
      }
    }
    if (!pushed) stack_.pop_back();
  }
  return std::nullopt;
}

}  // namespace ias
