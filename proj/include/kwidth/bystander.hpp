#pragma once

// The partially-free bystander rule: an item is a bystander when one of its
// variables/vertices occurs in no other item of the sequence. Signs are
// ignored; duplicate copies of an item (with replacement) block each other.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kwidth/ensembles.hpp"
#include "kwidth/properties.hpp"
#include "kwidth/rng.hpp"

namespace kwidth {

struct OccurrenceTable {
  std::vector<std::uint32_t> counts;  // indexed by variable/vertex

  OccurrenceTable(const Universe& u, std::span<const Item> items) : counts(u.n(), 0) {
    for (const Item& item : items) {
      for (std::uint32_t v : item.slots()) ++counts[v];
    }
  }

  // Slots within an item are distinct, so "occurs nowhere else" means count 1.
  bool free_at(const Item& item, std::size_t position) const { return counts[item.slot(position)] == 1; }
};

struct BystanderReport {
  std::vector<bool> flags;
  std::uint64_t free_count = 0;
  double predicted_fraction = 0.0;
  std::uint64_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;

  double empirical_fraction() const { return m == 0 ? 0.0 : static_cast<double>(free_count) / static_cast<double>(m); }
};

// Naive expectation 1 - (1 - e^{-km/n})^k of the partially-free fraction.
inline double predicted_free_fraction(std::uint32_t k, double m, double n) {
  if (k < 1 || n < k) throw std::invalid_argument("predicted_free_fraction needs n >= k >= 1");
  if (m < 0) throw std::invalid_argument("predicted_free_fraction needs m >= 0");
  const double busy = -std::expm1(-static_cast<double>(k) * m / n);  // 1 - e^{-km/n}
  return -std::expm1(static_cast<double>(k) * std::log(busy));       // 1 - busy^k
}

inline std::vector<bool> partially_free_flags(const Universe& u, std::span<const Item> items) {
  const OccurrenceTable table(u, items);
  std::vector<bool> flags(items.size(), false);
  for (std::size_t i = 0; i < items.size(); ++i) {
    for (std::size_t j = 0; j < items[i].arity(); ++j) {
      if (table.free_at(items[i], j)) {
        flags[i] = true;
        break;
      }
    }
  }
  return flags;
}

inline BystanderReport classify_partially_free(const ItemSequence& seq) {
  BystanderReport report;
  report.flags = partially_free_flags(seq.universe, seq.view());
  for (bool f : report.flags) report.free_count += f ? 1 : 0;
  report.m = seq.size();
  report.n = seq.universe.n();
  report.k = seq.universe.k();
  report.predicted_fraction =
      predicted_free_fraction(report.k, static_cast<double>(report.m), static_cast<double>(report.n));
  return report;
}

// Items whose slots at every position in the bitmask are free. Bit j of
// `positions` selects slot position j.
inline std::uint64_t count_position_free(const ItemSequence& seq, std::uint32_t positions) {
  const std::uint32_t k = seq.universe.k();
  if (positions == 0) throw std::invalid_argument("position set must be nonempty");
  if (k < 32 && (positions >> k) != 0) throw std::invalid_argument("position set outside 0..k-1");
  const OccurrenceTable table(seq.universe, seq.view());
  std::uint64_t count = 0;
  for (const Item& item : seq.items) {
    bool all_free = true;
    for (std::size_t j = 0; j < k && all_free; ++j) {
      if ((positions >> j) & 1U) all_free = table.free_at(item, j);
    }
    count += all_free ? 1 : 0;
  }
  return count;
}

// Items whose first d positions are free.
inline std::uint64_t count_d_free(const ItemSequence& seq, std::uint32_t d) {
  if (d < 1 || d > seq.universe.k()) throw std::invalid_argument("d must lie in 1..k");
  return count_position_free(seq, (1U << d) - 1);
}

// Partially-free count assembled from position-free counts by
// inclusion-exclusion: m - sum_S (-1)^{|S|} N(S), with N(empty) = m.
inline std::int64_t partially_free_by_inclusion_exclusion(const ItemSequence& seq) {
  const std::uint32_t k = seq.universe.k();
  const auto m = static_cast<std::int64_t>(seq.size());
  std::int64_t alternating = m;  // S = empty set
  for (std::uint32_t s = 1; s < (1U << k); ++s) {
    const auto term = static_cast<std::int64_t>(count_position_free(seq, s));
    alternating += (std::popcount(s) % 2 == 0) ? term : -term;
  }
  return m - alternating;
}

// Checks property(B) == property(B \ G) for B = A and `subset_trials` random
// subsets B of A, where G are the bystanders of A. Returns false on the first
// violation.
inline bool validate_bystander_rule(const PropertyKind& property, const ItemSequence& seq,
                                    std::uint64_t subset_trials, SplitMix64& rng) {
  const std::vector<bool> bystander = partially_free_flags(seq.universe, seq.view());
  bool any = false;
  for (bool f : bystander) any = any || f;
  if (!any) return true;
  std::vector<Item> with;
  std::vector<Item> without;
  for (std::uint64_t trial = 0; trial <= subset_trials; ++trial) {
    with.clear();
    without.clear();
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (trial > 0 && !rng.coin()) continue;
      with.push_back(seq[i]);
      if (!bystander[i]) without.push_back(seq[i]);
    }
    if (evaluate(property, seq.universe, with) != evaluate(property, seq.universe, without)) return false;
  }
  return true;
}

}  // namespace kwidth
