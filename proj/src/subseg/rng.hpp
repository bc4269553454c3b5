#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

namespace subseg {

/// Seeded generator shared by every randomized operation (shuffles, subsampling,
/// parameter initialization).
///
/// The state is four 64-bit words filled by successive splitmix64 outputs of the
/// seed:
///
///     s += 0x9E3779B97F4A7C15
///     z = s
///     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///     out = z ^ (z >> 31)
///
/// Each draw is xoshiro256**:
///
///     result = rotl(s1 * 5, 7) * 9
///     t = s1 << 17
///     s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t; s3 = rotl(s3, 45)
///
/// All arithmetic is modulo 2^64. Bounded draws use rejection sampling:
/// threshold = (2^64 - n) mod n, draw r until r >= threshold, return r mod n.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double unit();

private:
  std::array<std::uint64_t, 4> _state;
};

/// Fisher-Yates: for i = n-1 down to 1, swap(items[i], items[below(i+1)]).
template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace subseg
