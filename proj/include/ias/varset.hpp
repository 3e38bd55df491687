#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace ias {

/// A set of predictor indices drawn from {1, ..., d}.
///
/// Predictors 1..64 live in a single inline word; larger indices spill into a
/// heap-allocated word array, so the common d <= 64 case never allocates.
/// The spill array is kept trimmed (no trailing zero words) so that equality
/// and hashing are plain word comparisons.
class VarSet {
 public:
  VarSet() = default;
  VarSet(std::initializer_list<int> members);

  static VarSet from_indices(std::span<const int> members);
  /// {first, ..., last}; empty when last < first.
  static VarSet range(int first, int last);
  /// Members are the bits of `mask`, bit i standing for predictor i + 1.
  static VarSet from_mask(std::uint64_t mask) {
    VarSet s;
    s.head_ = mask;
    return s;
  }

  void insert(int k);
  void erase(int k);
  bool contains(int k) const;

  int size() const;
  bool empty() const { return head_ == 0 && tail_.empty(); }
  /// Largest member, or 0 when empty.
  int max_member() const;
  /// Smallest member, or 0 when empty.
  int min_member() const;

  VarSet& operator|=(const VarSet& other);
  VarSet& operator&=(const VarSet& other);
  VarSet& operator-=(const VarSet& other);
  friend VarSet operator|(VarSet a, const VarSet& b) { return a |= b; }
  friend VarSet operator&(VarSet a, const VarSet& b) { return a &= b; }
  friend VarSet operator-(VarSet a, const VarSet& b) { return a -= b; }

  bool is_subset_of(const VarSet& other) const;
  bool is_strict_subset_of(const VarSet& other) const { return is_subset_of(other) && *this != other; }
  bool intersects(const VarSet& other) const;

  bool operator==(const VarSet& other) const = default;

  std::vector<int> to_vector() const;
  std::string to_string() const;  // "{1,3,4}"
  std::size_t hash() const;

  /// Calls f(k) for each member in increasing order.
  template <typename F>
  void for_each(F&& f) const {
    visit_word(head_, 0, f);
    for (std::size_t w = 0; w < tail_.size(); ++w) visit_word(tail_[w], 64 * (w + 1), f);
  }

 private:
  template <typename F>
  static void visit_word(std::uint64_t word, int offset, F& f) {
    while (word != 0) {
      const int bit = std::countr_zero(word);
      f(offset + bit + 1);
      word &= word - 1;
    }
  }
  void trim();

  std::uint64_t head_ = 0;
  std::vector<std::uint64_t> tail_;
};

/// Canonical family order: by size, then lexicographically by the sorted
/// member list.
bool canonical_less(const VarSet& a, const VarSet& b);

/// Lexicographic comparison of the sorted member lists.
bool lexicographic_less(const VarSet& a, const VarSet& b);

}  // namespace ias

template <>
struct std::hash<ias::VarSet> {
  std::size_t operator()(const ias::VarSet& s) const noexcept { return s.hash(); }
};
