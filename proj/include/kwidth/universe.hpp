#pragma once

// Item spaces: signed k-clauses over n variables, graph edges, and k-uniform
// hyperedges. Items are kept in canonical form (sorted slots, aligned sign
// bits) and can be mapped to and from a dense rank in [0, M).

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace kwidth {

using BigCount = unsigned __int128;

inline constexpr std::size_t kMaxArity = 16;

enum class ItemKind { Clause, Edge, Hyperedge };

inline std::string_view to_string(ItemKind kind) {
  switch (kind) {
    case ItemKind::Clause: return "clause";
    case ItemKind::Edge: return "edge";
    case ItemKind::Hyperedge: return "hyperedge";
  }
  return "?";
}

inline ItemKind parse_item_kind(std::string_view text) {
  if (text == "clause") return ItemKind::Clause;
  if (text == "edge") return ItemKind::Edge;
  if (text == "hyperedge") return ItemKind::Hyperedge;
  throw std::invalid_argument("unknown item kind '" + std::string(text) + "'");
}

// C(n, k) exactly; throws std::overflow_error past 128 bits.
inline BigCount binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigCount result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    BigCount next;
    if (__builtin_mul_overflow(result, static_cast<BigCount>(n - i), &next)) {
      throw std::overflow_error("binomial coefficient exceeds 128-bit range");
    }
    result = next / (i + 1);
  }
  return result;
}

// C(n, k), saturating at the largest 128-bit value instead of throwing.
inline BigCount binomial_saturating(std::uint64_t n, std::uint64_t k) noexcept {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigCount result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    BigCount next;
    if (__builtin_mul_overflow(result, static_cast<BigCount>(n - i), &next)) return ~BigCount{0};
    result = next / (i + 1);
  }
  return result;
}

inline std::string to_decimal(BigCount value) {
  if (value == 0) return "0";
  std::string digits;
  while (value != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

class Item {
 public:
  Item() = default;

  // Copies `slots` verbatim; use rank_of_item or is_canonical to validate.
  Item(std::span<const std::uint32_t> slots, std::uint32_t sign_mask = 0) : sign_mask_{sign_mask} {
    if (slots.size() > kMaxArity) throw std::invalid_argument("item arity exceeds kMaxArity");
    arity_ = static_cast<std::uint8_t>(slots.size());
    std::copy(slots.begin(), slots.end(), slots_.begin());
  }

  Item(std::initializer_list<std::uint32_t> slots, std::uint32_t sign_mask = 0)
      : Item(std::span<const std::uint32_t>(slots.begin(), slots.size()), sign_mask) {}

  std::size_t arity() const noexcept { return arity_; }
  std::span<const std::uint32_t> slots() const noexcept { return {slots_.data(), arity_}; }
  std::uint32_t slot(std::size_t j) const noexcept { return slots_[j]; }
  std::uint32_t sign_mask() const noexcept { return sign_mask_; }
  // Literal j is "slot(j), negated iff negated(j)".
  bool negated(std::size_t j) const noexcept { return ((sign_mask_ >> j) & 1U) != 0; }

  bool is_canonical() const noexcept {
    for (std::size_t j = 1; j < arity_; ++j) {
      if (slots_[j - 1] >= slots_[j]) return false;
    }
    return arity_ == kMaxArity || (sign_mask_ >> arity_) == 0;
  }

  friend bool operator==(const Item& a, const Item& b) noexcept {
    return a.arity_ == b.arity_ && a.sign_mask_ == b.sign_mask_ &&
           std::equal(a.slots_.begin(), a.slots_.begin() + a.arity_, b.slots_.begin());
  }

 private:
  std::array<std::uint32_t, kMaxArity> slots_{};
  std::uint32_t sign_mask_ = 0;
  std::uint8_t arity_ = 0;
};

class Universe {
 public:
  Universe(ItemKind kind, std::uint32_t n, std::uint32_t k) : kind_{kind}, n_{n}, k_{k} {
    if (k < 1) throw std::invalid_argument("universe arity k must be at least 1");
    if (n < k) throw std::invalid_argument("universe needs n >= k");
    if (k > kMaxArity) throw std::invalid_argument("universe arity exceeds kMaxArity");
    if (kind == ItemKind::Edge && k != 2) throw std::invalid_argument("edge universes have k = 2");
    size_ = binomial(n, k);
    if (kind == ItemKind::Clause) {
      if (size_ > (~BigCount{0} >> k)) throw std::overflow_error("universe size exceeds 128-bit range");
      size_ <<= k;
    }
  }

  static Universe clauses(std::uint32_t n, std::uint32_t k) { return {ItemKind::Clause, n, k}; }
  static Universe edges(std::uint32_t n) { return {ItemKind::Edge, n, 2}; }
  static Universe hyperedges(std::uint32_t n, std::uint32_t k) { return {ItemKind::Hyperedge, n, k}; }

  ItemKind kind() const noexcept { return kind_; }
  std::uint32_t n() const noexcept { return n_; }
  std::uint32_t k() const noexcept { return k_; }
  std::uint32_t sign_multiplier() const noexcept { return kind_ == ItemKind::Clause ? 2 : 1; }
  bool is_signed() const noexcept { return kind_ == ItemKind::Clause; }
  bool is_graph() const noexcept { return kind_ != ItemKind::Clause; }

  // M = sign_multiplier^k * C(n, k).
  BigCount size() const noexcept { return size_; }

  // M when it fits the 64-bit rank space used by sampling.
  std::uint64_t size64() const {
    if (size_ > static_cast<BigCount>(UINT64_MAX)) {
      throw std::overflow_error("universe size " + to_decimal(size_) + " exceeds 64-bit rank space");
    }
    return static_cast<std::uint64_t>(size_);
  }

  friend bool operator==(const Universe&, const Universe&) = default;

 private:
  ItemKind kind_;
  std::uint32_t n_;
  std::uint32_t k_;
  BigCount size_ = 0;
};

inline BigCount universe_size(const Universe& u) { return u.size(); }

// Throws std::invalid_argument unless `item` is a canonical member of `u`.
inline void check_item(const Universe& u, const Item& item) {
  if (item.arity() != u.k()) throw std::invalid_argument("item arity does not match universe");
  for (std::size_t j = 0; j < item.arity(); ++j) {
    if (item.slot(j) >= u.n()) throw std::invalid_argument("item slot out of range");
    if (j > 0 && item.slot(j - 1) >= item.slot(j)) {
      throw std::invalid_argument("item slots must be distinct and increasing");
    }
  }
  const std::uint32_t allowed = u.is_signed() ? ((1U << u.k()) - 1) : 0U;
  if ((item.sign_mask() & ~allowed) != 0) throw std::invalid_argument("item sign bits outside universe");
}

// Colex rank of the slot combination times 2^k, plus the sign bits.
inline std::uint64_t rank_of_item(const Universe& u, const Item& item) {
  check_item(u, item);
  BigCount comb = 0;
  for (std::size_t j = 0; j < item.arity(); ++j) comb += binomial(item.slot(j), j + 1);
  if (u.is_signed()) comb = (comb << u.k()) | item.sign_mask();
  if (comb > static_cast<BigCount>(UINT64_MAX)) throw std::overflow_error("rank exceeds 64-bit range");
  return static_cast<std::uint64_t>(comb);
}

inline Item item_from_rank(const Universe& u, std::uint64_t rank) {
  if (static_cast<BigCount>(rank) >= u.size()) {
    throw std::out_of_range("rank " + std::to_string(rank) + " outside universe of size " + to_decimal(u.size()));
  }
  std::uint32_t signs = 0;
  BigCount comb = rank;
  if (u.is_signed()) {
    signs = static_cast<std::uint32_t>(rank & ((std::uint64_t{1} << u.k()) - 1));
    comb = rank >> u.k();
  }
  std::array<std::uint32_t, kMaxArity> slots{};
  std::uint32_t upper = u.n();  // exclusive bound on slots[j]
  for (std::size_t pos = u.k(); pos-- > 0;) {
    // largest c in [pos, upper) with C(c, pos + 1) <= comb
    std::uint32_t lo = static_cast<std::uint32_t>(pos);
    std::uint32_t hi = upper - 1;
    while (lo < hi) {
      const std::uint32_t mid = lo + (hi - lo + 1) / 2;
      if (binomial_saturating(mid, pos + 1) <= comb) {
        lo = mid;
      } else {
        hi = mid - 1;
      }
    }
    slots[pos] = lo;
    comb -= binomial(lo, pos + 1);
    upper = lo;
  }
  return Item(std::span<const std::uint32_t>(slots.data(), u.k()), signs);
}

}  // namespace kwidth
