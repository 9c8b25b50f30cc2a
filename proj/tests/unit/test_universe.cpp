#include <set>

#include <gtest/gtest.h>

#include "kwidth/universe.hpp"
#include "support/oracles.hpp"

using namespace kwidth;

TEST(Universe, SizeMatchesSmallCases) {
  EXPECT_EQ(universe_size(Universe::clauses(3, 3)), 8U);
  EXPECT_EQ(universe_size(Universe::edges(5)), 10U);
  EXPECT_EQ(universe_size(Universe::clauses(100, 3)), 1293600U);
  EXPECT_EQ(universe_size(Universe::hyperedges(7, 3)), 35U);
}

TEST(Universe, SizeMatchesPascalOracle) {
  for (unsigned n = 1; n <= 30; ++n) {
    for (unsigned k = 1; k <= std::min(n, 8U); ++k) {
      const auto expected = oracle::pascal(n, k);
      EXPECT_EQ(static_cast<std::uint64_t>(Universe::hyperedges(n, k).size()), expected.convert_to<std::uint64_t>());
      EXPECT_EQ(static_cast<std::uint64_t>(Universe::clauses(n, k).size()),
                (expected << k).convert_to<std::uint64_t>());
    }
  }
}

TEST(Universe, LargeSizeExactIn128Bits) {
  const Universe u = Universe::clauses(100000, 5);
  EXPECT_EQ(to_decimal(u.size()), (oracle::pascal(100000, 5) * 32).str());
  EXPECT_THROW(u.size64(), std::overflow_error);
}

TEST(Universe, InvalidParametersRejected) {
  EXPECT_THROW(Universe(ItemKind::Clause, 2, 3), std::invalid_argument);
  EXPECT_THROW(Universe(ItemKind::Edge, 5, 3), std::invalid_argument);
  EXPECT_THROW(Universe(ItemKind::Hyperedge, 5, 0), std::invalid_argument);
}

TEST(Universe, RankExamples) {
  const Universe e = Universe::edges(3);
  EXPECT_EQ(item_from_rank(e, 0), (Item{0, 1}));
  EXPECT_EQ(item_from_rank(e, 2), (Item{1, 2}));
  const Universe c = Universe::clauses(3, 1);
  EXPECT_EQ(item_from_rank(c, 0), (Item({0}, 0)));
  EXPECT_EQ(item_from_rank(c, 1), (Item({0}, 1)));
  EXPECT_TRUE(item_from_rank(c, 1).negated(0));
}

TEST(Universe, RoundTripExhaustive) {
  for (const Universe& u : {Universe::clauses(5, 2), Universe::clauses(8, 3), Universe::edges(40),
                            Universe::hyperedges(20, 4), Universe::clauses(3, 3)}) {
    const std::uint64_t total = u.size64();
    std::set<std::vector<std::uint32_t>> seen;
    for (std::uint64_t r = 0; r < total; ++r) {
      const Item item = item_from_rank(u, r);
      ASSERT_TRUE(item.is_canonical());
      ASSERT_EQ(rank_of_item(u, item), r);
      std::vector<std::uint32_t> key(item.slots().begin(), item.slots().end());
      key.push_back(item.sign_mask());
      seen.insert(key);
    }
    EXPECT_EQ(seen.size(), total);
  }
}

TEST(Universe, ColexThenSignOrder) {
  const Universe u = Universe::clauses(4, 2);
  Item prev = item_from_rank(u, 0);
  for (std::uint64_t r = 1; r < u.size64(); ++r) {
    const Item cur = item_from_rank(u, r);
    if (cur.slots()[0] == prev.slots()[0] && cur.slots()[1] == prev.slots()[1]) {
      EXPECT_EQ(cur.sign_mask(), prev.sign_mask() + 1);
    } else {
      EXPECT_EQ(cur.sign_mask(), 0U);
      // colex: compare highest slot first
      EXPECT_TRUE(cur.slot(1) > prev.slot(1) || (cur.slot(1) == prev.slot(1) && cur.slot(0) > prev.slot(0)));
    }
    prev = cur;
  }
}

TEST(Universe, RejectsBadItems) {
  const Universe u = Universe::clauses(5, 2);
  EXPECT_THROW(rank_of_item(u, Item{1, 1}), std::invalid_argument);
  EXPECT_THROW(rank_of_item(u, Item{2, 1}), std::invalid_argument);
  EXPECT_THROW(rank_of_item(u, Item{1, 5}), std::invalid_argument);
  EXPECT_THROW(rank_of_item(u, Item{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(rank_of_item(Universe::edges(5), Item({1, 2}, 1)), std::invalid_argument);
  EXPECT_THROW(item_from_rank(u, u.size64()), std::out_of_range);
}

TEST(Universe, SingleItemUniverse) {
  const Universe u = Universe::hyperedges(4, 4);
  EXPECT_EQ(u.size64(), 1U);
  EXPECT_EQ(rank_of_item(u, item_from_rank(u, 0)), 0U);
}
