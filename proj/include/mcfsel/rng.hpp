#ifndef MCFSEL_RNG_HPP
#define MCFSEL_RNG_HPP

#include <cstdint>

namespace mcfsel {

// SplitMix64 (Steele, Lea, Flood 2014). Chosen over std::mt19937 because its
// output is fully specified by these few lines, so corpora regenerate
// byte-identically on any platform and compiler.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform value in [0, bound). Multiply-shift map instead of modulo so the
  // result does not depend on platform integer division quirks; the slight
  // non-uniformity (< 2^-53 for our bounds) is irrelevant here.
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform integer in [lo, hi], inclusive.
  std::int64_t next_in(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Derive an independent stream for a keyed subtask. Feeding the mixed key
  // back through SplitMix keeps streams decorrelated for adjacent keys.
  SplitMix64 split(std::uint64_t key) const {
    SplitMix64 mixer(state_ ^ (0x9e3779b97f4a7c15ULL * (key + 1)));
    return SplitMix64(mixer.next());
  }

 private:
  std::uint64_t state_;
};

}  // namespace mcfsel

#endif
