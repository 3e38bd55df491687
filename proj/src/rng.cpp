#include "ias/rng.hpp"

#include <cmath>
#include <numbers>

#include "ias/errors.hpp"

namespace ias {

std::uint64_t Rng::mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw ArgumentError("Rng::below requires n > 0");
  __extension__ using u128 = unsigned __int128;
  const u128 product = static_cast<u128>(next_u64()) * n;
  return static_cast<std::uint64_t>(product >> 64);
}

int Rng::uniform_int(int lo, int hi) {
  if (hi < lo) throw ArgumentError("Rng::uniform_int: empty range");
  return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::split(std::uint64_t stream_id) const {
  return Rng(mix64(key_ ^ mix64(stream_id + 0x632be59bd9b4e019ULL)));
}

}  // namespace ias
