#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ikpca {

// xoshiro256** (Blackman & Vigna), seeded through splitmix64 as its authors
// recommend.  Chosen over std::mt19937/std::shuffle because its output is
// fully pinned by the published algorithm, so recorded experiment orderings
// replay identically on any platform or language.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

// Unbiased integer in [0, bound) by rejection: draws below 2^64 mod bound
// are discarded so every residue is equally likely.
inline std::uint64_t uniform_below(Xoshiro256StarStar& rng,
                                   std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: bound is zero");
  const std::uint64_t reject = (0 - bound) % bound;
  std::uint64_t draw = rng();
  while (draw < reject) draw = rng();
  return draw % bound;
}

// Fisher-Yates shuffle written out by hand; std::shuffle's draw sequence is
// implementation-defined, which would break cross-platform replay.
template <class T>
void shuffle(std::vector<T>& items, Xoshiro256StarStar& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j =
        static_cast<std::size_t>(uniform_below(rng, static_cast<std::uint64_t>(i)));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace ikpca
