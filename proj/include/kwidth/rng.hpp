#pragma once

#include <cstdint>
#include <limits>

namespace kwidth {

// SplitMix64 (Steele, Lea & Flood 2014). Each trial gets its own stream whose
// starting state is a pure function of (master_seed, trial_index, stream_id),
// so trials can run in any order on any thread and still reproduce bit for bit.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  constexpr explicit SplitMix64(std::uint64_t state = 0) noexcept : state_{state} {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Stream for one trial. stream_id separates independent consumers inside the
  // same trial (e.g. the item sequence and a tagging permutation).
  static constexpr SplitMix64 for_trial(std::uint64_t master_seed, std::uint64_t trial_index,
                                        std::uint64_t stream_id = 0) noexcept {
    std::uint64_t s = mix(master_seed + 0x9e3779b97f4a7c15ULL);
    s = mix(s ^ (trial_index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
    s = mix(s ^ (stream_id * 0xa0761d6478bd642fULL + 0xe7037ed1a0b428dbULL));
    return SplitMix64{s};
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform integer in [0, bound). Lemire's multiply-shift with rejection, so
  // the result is exactly uniform and platform independent.
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 product = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        product = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(product);
      }
    }
    return static_cast<std::uint64_t>(product >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // Uniform double in (0, 1]; safe to pass to log().
  constexpr double uniform_open_low() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  constexpr bool coin() noexcept { return ((*this)() >> 63) != 0; }

  constexpr std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

// In-place Fisher-Yates shuffle driven by SplitMix64::below.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, SplitMix64& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace kwidth
