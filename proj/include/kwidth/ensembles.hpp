#pragma once

// The three random ensembles: m items without replacement (F_{n,m}), m items
// with replacement, and independent inclusion with probability p (F_{n,p}).

#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kwidth/rng.hpp"
#include "kwidth/universe.hpp"

namespace kwidth {

enum class EnsembleMode { WithoutReplacement, WithReplacement, Bernoulli };

// CLI names: fnm, fnm-rep, fnp.
inline std::string_view to_string(EnsembleMode mode) {
  switch (mode) {
    case EnsembleMode::WithoutReplacement: return "fnm";
    case EnsembleMode::WithReplacement: return "fnm-rep";
    case EnsembleMode::Bernoulli: return "fnp";
  }
  return "?";
}

inline EnsembleMode parse_ensemble_mode(std::string_view text) {
  if (text == "fnm") return EnsembleMode::WithoutReplacement;
  if (text == "fnm-rep") return EnsembleMode::WithReplacement;
  if (text == "fnp") return EnsembleMode::Bernoulli;
  throw std::invalid_argument("unknown ensemble '" + std::string(text) + "'");
}

struct EnsembleSpec {
  EnsembleMode mode = EnsembleMode::WithoutReplacement;
  std::uint64_t m = 0;  // item count for the two fixed-size modes
  double p = 0.0;       // inclusion probability for Bernoulli

  static EnsembleSpec without_replacement(std::uint64_t m) { return {EnsembleMode::WithoutReplacement, m, 0.0}; }
  static EnsembleSpec with_replacement(std::uint64_t m) { return {EnsembleMode::WithReplacement, m, 0.0}; }
  static EnsembleSpec bernoulli(double p) { return {EnsembleMode::Bernoulli, 0, p}; }

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;

  SplitMix64 stream(std::uint64_t stream_id = 0) const {
    return SplitMix64::for_trial(master_seed, trial_index, stream_id);
  }

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

// An ordered sample of items. Provenance is absent for sequences that were
// read from a file or built by hand.
struct ItemSequence {
  Universe universe;
  std::vector<Item> items;
  std::optional<EnsembleSpec> spec;
  std::optional<SeedSpec> seed;

  explicit ItemSequence(Universe u, std::vector<Item> xs = {}, std::optional<EnsembleSpec> s = std::nullopt,
                        std::optional<SeedSpec> sd = std::nullopt)
      : universe{u}, items{std::move(xs)}, spec{s}, seed{sd} {}

  std::size_t size() const noexcept { return items.size(); }
  bool empty() const noexcept { return items.empty(); }
  std::span<const Item> view() const noexcept { return items; }
  const Item& operator[](std::size_t i) const noexcept { return items[i]; }
};

namespace detail {

// Uniform k-subset of [0, n) by Floyd's algorithm, sorted, plus uniform signs.
inline Item random_item(const Universe& u, SplitMix64& rng) {
  const std::uint32_t n = u.n();
  const std::uint32_t k = u.k();
  std::array<std::uint32_t, kMaxArity> chosen{};
  std::size_t count = 0;
  for (std::uint32_t j = n - k; j < n; ++j) {
    const auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
    const bool present = std::find(chosen.begin(), chosen.begin() + count, t) != chosen.begin() + count;
    chosen[count++] = present ? j : t;
  }
  std::sort(chosen.begin(), chosen.begin() + count);
  const std::uint32_t signs = u.is_signed() ? static_cast<std::uint32_t>(rng.below(std::uint64_t{1} << k)) : 0U;
  return Item(std::span<const std::uint32_t>(chosen.data(), count), signs);
}

// Rank of a canonical item without validation (hot path in rejection sampling).
inline std::uint64_t fast_rank(const Universe& u, const Item& item) {
  std::uint64_t comb = 0;
  for (std::size_t j = 0; j < item.arity(); ++j) {
    comb += static_cast<std::uint64_t>(binomial_saturating(item.slot(j), j + 1));
  }
  return u.is_signed() ? (comb << u.k()) | item.sign_mask() : comb;
}

// Gap to the next included rank under Bernoulli(p), 0 < p < 1. Returns
// UINT64_MAX when the gap runs past any representable rank.
inline std::uint64_t geometric_skip(double p, SplitMix64& rng) {
  const double skip = std::floor(std::log(rng.uniform_open_low()) / std::log1p(-p));
  if (!(skip < 1.8e19)) return UINT64_MAX;
  return static_cast<std::uint64_t>(skip);
}

}  // namespace detail

inline void validate(const Universe& u, const EnsembleSpec& spec) {
  switch (spec.mode) {
    case EnsembleMode::WithoutReplacement:
      if (static_cast<BigCount>(spec.m) > u.size()) {
        throw std::invalid_argument("cannot draw " + std::to_string(spec.m) + " distinct items from a universe of " +
                                    to_decimal(u.size()));
      }
      break;
    case EnsembleMode::WithReplacement:
      break;
    case EnsembleMode::Bernoulli:
      if (!(spec.p >= 0.0 && spec.p <= 1.0)) throw std::invalid_argument("inclusion probability must lie in [0, 1]");
      break;
  }
}

// Without replacement: rejection over ranks with a seen-set while m <= M/4,
// otherwise a partial Fisher-Yates over the materialised rank array. Both
// produce each prefix as a uniform sample, so prefixes nest.
inline ItemSequence sample(const Universe& u, const EnsembleSpec& spec, const SeedSpec& seed) {
  validate(u, spec);
  SplitMix64 rng = seed.stream();
  std::vector<Item> items;
  switch (spec.mode) {
    case EnsembleMode::WithReplacement: {
      items.reserve(spec.m);
      for (std::uint64_t i = 0; i < spec.m; ++i) items.push_back(detail::random_item(u, rng));
      break;
    }
    case EnsembleMode::WithoutReplacement: {
      const std::uint64_t total = u.size64();
      items.reserve(spec.m);
      if (spec.m <= total / 4) {
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(spec.m * 2);
        while (items.size() < spec.m) {
          Item candidate = detail::random_item(u, rng);
          if (seen.insert(detail::fast_rank(u, candidate)).second) items.push_back(candidate);
        }
      } else {
        std::vector<std::uint64_t> ranks(total);
        std::iota(ranks.begin(), ranks.end(), std::uint64_t{0});
        for (std::uint64_t i = 0; i < spec.m; ++i) {
          const std::uint64_t j = i + rng.below(total - i);
          std::swap(ranks[i], ranks[j]);
          items.push_back(item_from_rank(u, ranks[i]));
        }
      }
      break;
    }
    case EnsembleMode::Bernoulli: {
      const std::uint64_t total = u.size64();
      if (spec.p <= 0.0) break;
      if (spec.p >= 1.0) {
        items.reserve(total);
        for (std::uint64_t r = 0; r < total; ++r) items.push_back(item_from_rank(u, r));
        break;
      }
      std::uint64_t next = 0;
      for (;;) {
        const std::uint64_t skip = detail::geometric_skip(spec.p, rng);
        if (skip >= total - next) break;
        next += skip;
        items.push_back(item_from_rank(u, next));
        if (++next >= total) break;
      }
      break;
    }
  }
  return ItemSequence(u, std::move(items), spec, seed);
}

// First j items. Under WithoutReplacement the prefix is itself a uniform
// j-sample, which is what lets one sampled sequence serve every m <= length.
inline ItemSequence prefix(const ItemSequence& seq, std::size_t j) {
  if (j > seq.size()) {
    throw std::out_of_range("prefix length " + std::to_string(j) + " exceeds sequence length " +
                            std::to_string(seq.size()));
  }
  std::optional<EnsembleSpec> spec = seq.spec;
  if (spec && spec->mode != EnsembleMode::Bernoulli) spec->m = j;
  return ItemSequence(seq.universe, std::vector<Item>(seq.items.begin(), seq.items.begin() + static_cast<std::ptrdiff_t>(j)),
                      spec, seq.seed);
}

// Number of items a Bernoulli(p) draw would include, using the same stream
// and skip sequence as sample() but without materialising items.
inline std::uint64_t bernoulli_count(const Universe& u, double p, const SeedSpec& seed) {
  validate(u, EnsembleSpec::bernoulli(p));
  const std::uint64_t total = u.size64();
  if (p <= 0.0) return 0;
  if (p >= 1.0) return total;
  SplitMix64 rng = seed.stream();
  std::uint64_t next = 0;
  std::uint64_t count = 0;
  for (;;) {
    const std::uint64_t skip = detail::geometric_skip(p, rng);
    if (skip >= total - next) break;
    next += skip;
    ++count;
    if (++next >= total) break;
  }
  return count;
}

struct CountStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
};

inline CountStats bernoulli_count_stats(const Universe& u, double p, std::uint64_t trials, std::uint64_t master_seed) {
  if (trials == 0) throw std::invalid_argument("bernoulli_count_stats needs at least one trial");
  long double sum = 0;
  long double sum_sq = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto c = static_cast<long double>(bernoulli_count(u, p, SeedSpec{master_seed, t}));
    sum += c;
    sum_sq += c * c;
  }
  const long double mean = sum / static_cast<long double>(trials);
  long double var = 0;
  if (trials > 1) {
    var = (sum_sq - sum * mean) / static_cast<long double>(trials - 1);
    if (var < 0) var = 0;
  }
  return {static_cast<double>(mean), static_cast<double>(var)};
}

}  // namespace kwidth
