#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace ias {

/// SplitMix64 counter stream.
///
/// The i-th output (i = 1, 2, ...) of a stream with key k is
///   mix64(k + i * 0x9e3779b97f4a7c15)   (arithmetic mod 2^64)
/// where mix64 is the SplitMix64 finalizer. Child streams are keyed by
///   split(k, id) = mix64(k ^ mix64(id + 0x632be59bd9b4e019)).
/// Derived draws are defined on top of next_u64() so any language can
/// reproduce them bit for bit:
///   uniform()     = (next_u64() >> 11) * 2^-53                 in [0, 1)
///   below(n)      = high 64 bits of next_u64() * n             in [0, n)
///   normal()      = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)         (u1, u2 = uniform())
///   bernoulli(p)  = uniform() < p
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : key_(seed) {}

  static std::uint64_t mix64(std::uint64_t z);

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGamma);
  }
  result_type operator()() { return next_u64(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; does not advance this stream.
  Rng split(std::uint64_t stream_id) const;

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void shuffle(std::vector<T>& items) {
    shuffle(std::span<T>(items));
  }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ias
