#include "ias/varset.hpp"

#include <algorithm>
#include <sstream>

#include "ias/errors.hpp"

namespace ias {

namespace {

constexpr int kWordBits = 64;

std::uint64_t word_at(std::uint64_t head, const std::vector<std::uint64_t>& tail, std::size_t w) {
  if (w == 0) return head;
  return w - 1 < tail.size() ? tail[w - 1] : 0;
}

}  // namespace

VarSet::VarSet(std::initializer_list<int> members) {
  for (int k : members) insert(k);
}

VarSet VarSet::from_indices(std::span<const int> members) {
  VarSet s;
  for (int k : members) s.insert(k);
  return s;
}

VarSet VarSet::range(int first, int last) {
  VarSet s;
  for (int k = first; k <= last; ++k) s.insert(k);
  return s;
}

void VarSet::insert(int k) {
  if (k < 1) throw ArgumentError("VarSet members are predictor indices >= 1, got " + std::to_string(k));
  const auto bit = static_cast<std::size_t>(k - 1);
  const std::size_t w = bit / kWordBits;
  const std::uint64_t mask = std::uint64_t{1} << (bit % kWordBits);
  if (w == 0) {
    head_ |= mask;
    return;
  }
  if (tail_.size() < w) tail_.resize(w, 0);
  tail_[w - 1] |= mask;
}

void VarSet::erase(int k) {
  if (k < 1) return;
  const auto bit = static_cast<std::size_t>(k - 1);
  const std::size_t w = bit / kWordBits;
  const std::uint64_t mask = std::uint64_t{1} << (bit % kWordBits);
  if (w == 0) {
    head_ &= ~mask;
    return;
  }
  if (w - 1 < tail_.size()) {
    tail_[w - 1] &= ~mask;
    trim();
  }
}

bool VarSet::contains(int k) const {
  if (k < 1) return false;
  const auto bit = static_cast<std::size_t>(k - 1);
  return (word_at(head_, tail_, bit / kWordBits) >> (bit % kWordBits)) & 1U;
}

int VarSet::size() const {
  int n = std::popcount(head_);
  for (auto w : tail_) n += std::popcount(w);
  return n;
}

int VarSet::max_member() const {
  for (std::size_t w = tail_.size(); w > 0; --w) {
    if (tail_[w - 1] != 0) return static_cast<int>(64 * w) + (63 - std::countl_zero(tail_[w - 1])) + 1;
  }
  return head_ == 0 ? 0 : (63 - std::countl_zero(head_)) + 1;
}

int VarSet::min_member() const {
  if (head_ != 0) return std::countr_zero(head_) + 1;
  for (std::size_t w = 0; w < tail_.size(); ++w) {
    if (tail_[w] != 0) return static_cast<int>(64 * (w + 1)) + std::countr_zero(tail_[w]) + 1;
  }
  return 0;
}

VarSet& VarSet::operator|=(const VarSet& other) {
  head_ |= other.head_;
  if (tail_.size() < other.tail_.size()) tail_.resize(other.tail_.size(), 0);
  for (std::size_t i = 0; i < other.tail_.size(); ++i) tail_[i] |= other.tail_[i];
  return *this;
}

VarSet& VarSet::operator&=(const VarSet& other) {
  head_ &= other.head_;
  if (tail_.size() > other.tail_.size()) tail_.resize(other.tail_.size());
  for (std::size_t i = 0; i < tail_.size(); ++i) tail_[i] &= other.tail_[i];
  trim();
  return *this;
}

VarSet& VarSet::operator-=(const VarSet& other) {
  head_ &= ~other.head_;
  const std::size_t n = std::min(tail_.size(), other.tail_.size());
  for (std::size_t i = 0; i < n; ++i) tail_[i] &= ~other.tail_[i];
  trim();
  return *this;
}

bool VarSet::is_subset_of(const VarSet& other) const {
  if ((head_ & ~other.head_) != 0) return false;
  if (tail_.size() > other.tail_.size()) return false;  // trimmed: our top word is nonzero
  for (std::size_t i = 0; i < tail_.size(); ++i) {
    if ((tail_[i] & ~other.tail_[i]) != 0) return false;
  }
  return true;
}

bool VarSet::intersects(const VarSet& other) const {
  if ((head_ & other.head_) != 0) return true;
  const std::size_t n = std::min(tail_.size(), other.tail_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if ((tail_[i] & other.tail_[i]) != 0) return true;
  }
  return false;
}

std::vector<int> VarSet::to_vector() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(size()));
  for_each([&](int k) { out.push_back(k); });
  return out;
}

std::string VarSet::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for_each([&](int k) {
    if (!first) os << ',';
    os << k;
    first = false;
  });
  os << '}';
  return os.str();
}

std::size_t VarSet::hash() const {
  std::uint64_t h = head_ * 0x9e3779b97f4a7c15ULL;
  for (auto w : tail_) h = (h ^ w) * 0xbf58476d1ce4e5b9ULL + 0x94d049bb133111ebULL;
  return static_cast<std::size_t>(h ^ (h >> 31));
}

void VarSet::trim() {
  while (!tail_.empty() && tail_.back() == 0) tail_.pop_back();
}

bool lexicographic_less(const VarSet& a, const VarSet& b) {
  if (a == b) return false;
  // p is the first position where the sorted lists differ. The list holding p
  // is smaller, unless the other list has already ended (a proper prefix).
  const VarSet diff = (a - b) | (b - a);
  const int p = diff.min_member();
  const bool a_holds = a.contains(p);
  const VarSet& other = a_holds ? b : a;
  const bool holder_smaller = other.max_member() > p;
  return a_holds == holder_smaller;
}

bool canonical_less(const VarSet& a, const VarSet& b) {
  const int sa = a.size();
  const int sb = b.size();
  if (sa != sb) return sa < sb;
  return lexicographic_less(a, b);
}

}  // namespace ias
