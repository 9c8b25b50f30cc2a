#include <numeric>

#include <gtest/gtest.h>

#include "kwidth/bystander.hpp"
#include "support/fixtures.hpp"

using namespace kwidth;

namespace {

// Occurrence counting by hand: slot v of item i is free iff no other position
// of the sequence mentions v.
std::vector<bool> naive_flags(const ItemSequence& seq) {
  std::vector<bool> flags(seq.size(), false);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (std::uint32_t v : seq[i].slots()) {
      bool elsewhere = false;
      for (std::size_t j = 0; j < seq.size(); ++j) {
        if (j == i) continue;
        for (std::uint32_t w : seq[j].slots()) elsewhere = elsewhere || w == v;
      }
      if (!elsewhere) flags[i] = true;
    }
  }
  return flags;
}

}  // namespace

TEST(Bystander, SingleClauseIsBystander) {
  const ItemSequence seq(Universe::clauses(5, 3), {Item({0, 1, 2}, 0b100)});
  const auto r = classify_partially_free(seq);
  EXPECT_EQ(r.free_count, 1U);
  EXPECT_TRUE(r.flags[0]);
}

TEST(Bystander, PathEdgesBothFree) {
  const ItemSequence seq(Universe::edges(3), {Item{0, 1}, Item{1, 2}});
  const auto r = classify_partially_free(seq);
  EXPECT_EQ(r.free_count, 2U);
}

TEST(Bystander, TriangleHasNoBystanders) {
  const ItemSequence seq(Universe::edges(3), {Item{0, 1}, Item{1, 2}, Item{0, 2}});
  EXPECT_EQ(classify_partially_free(seq).free_count, 0U);
}

TEST(Bystander, DuplicatesBlockEachOther) {
  const ItemSequence seq(Universe::edges(4), {Item{0, 1}, Item{0, 1}});
  EXPECT_EQ(classify_partially_free(seq).free_count, 0U);
}

TEST(Bystander, SignsIgnored) {
  const ItemSequence seq(Universe::clauses(4, 2), {Item({0, 1}, 0), Item({0, 1}, 3)});
  EXPECT_EQ(classify_partially_free(seq).free_count, 0U);
}

TEST(Bystander, EmptySequence) {
  const ItemSequence seq(Universe::clauses(4, 2));
  const auto r = classify_partially_free(seq);
  EXPECT_EQ(r.free_count, 0U);
  EXPECT_EQ(r.empirical_fraction(), 0.0);
}

TEST(Bystander, MatchesNaiveCounting) {
  for (EnsembleMode mode : {EnsembleMode::WithoutReplacement, EnsembleMode::WithReplacement}) {
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto seq = sample(Universe::clauses(20, 3), EnsembleSpec{mode, 15, 0.0}, {31, t});
      const auto r = classify_partially_free(seq);
      const auto expected = naive_flags(seq);
      EXPECT_EQ(r.flags, expected);
      EXPECT_EQ(r.free_count, static_cast<std::uint64_t>(std::count(expected.begin(), expected.end(), true)));
    }
  }
}

TEST(Bystander, PermutationEquivariant) {
  const auto seq = sample(Universe::clauses(30, 3), EnsembleSpec::without_replacement(25), {2, 2});
  const auto base = classify_partially_free(seq).flags;
  std::vector<std::size_t> perm(seq.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(5);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Item> items;
  for (auto i : perm) items.push_back(seq[i]);
  const auto flags = classify_partially_free(ItemSequence(seq.universe, items)).flags;
  for (std::size_t i = 0; i < perm.size(); ++i) EXPECT_EQ(flags[i], base[perm[i]]);
}

TEST(Bystander, PositionFreeBasics) {
  const ItemSequence one(Universe::clauses(5, 3), {Item{0, 1, 2}});
  EXPECT_EQ(count_position_free(one, 0b111), 1U);
  EXPECT_EQ(count_position_free(ItemSequence(Universe::clauses(5, 3)), 0b111), 0U);
  EXPECT_THROW(count_position_free(one, 0), std::invalid_argument);
  EXPECT_THROW(count_position_free(one, 0b1000), std::invalid_argument);
}

TEST(Bystander, InclusionExclusionExact) {
  for (std::uint64_t t = 0; t < 200; ++t) {
    const auto seq = sample(Universe::clauses(20, 3), EnsembleSpec::without_replacement(30), {77, t});
    EXPECT_EQ(partially_free_by_inclusion_exclusion(seq),
              static_cast<std::int64_t>(classify_partially_free(seq).free_count));
  }
}

TEST(Bystander, PredictedFraction) {
  EXPECT_NEAR(predicted_free_fraction(3, 1e-6, 1024), 1.0, 1e-12);
  const double busy3 = 1 - std::exp(-3.0);
  EXPECT_NEAR(predicted_free_fraction(3, 1024, 1024), 1 - busy3 * busy3 * busy3, 1e-15);
  EXPECT_NEAR(predicted_free_fraction(3, 1024, 1024), 0.1420483584, 1e-9);
  EXPECT_NEAR(predicted_free_fraction(2, 1536, 1024), 1 - busy3 * busy3, 1e-15);
  EXPECT_NEAR(predicted_free_fraction(2, 1536, 1024), 0.0970954, 1e-7);
  EXPECT_THROW(predicted_free_fraction(3, 1, 2), std::invalid_argument);
  EXPECT_THROW(predicted_free_fraction(2, -1, 10), std::invalid_argument);
}

TEST(Bystander, LargeScaleConcentration) {
  const std::uint32_t n = 100000;
  const Universe u = Universe::clauses(n, 3);
  const double predicted = predicted_free_fraction(3, n, n);
  double sum = 0;
  const int trials = 5;
  for (int t = 0; t < trials; ++t) {
    const auto seq = sample(u, EnsembleSpec::without_replacement(n), {1, static_cast<std::uint64_t>(t)});
    const auto r = classify_partially_free(seq);
    EXPECT_NEAR(static_cast<double>(r.free_count), predicted * n, 5 * std::sqrt(double(n)));
    for (std::uint32_t d = 1; d <= 3; ++d) {
      EXPECT_NEAR(static_cast<double>(count_d_free(seq, d)), n * std::exp(-3.0 * d), 5 * std::sqrt(double(n)));
    }
    sum += r.empirical_fraction();
  }
  EXPECT_NEAR(sum / trials, predicted, 0.02 * predicted);
}

TEST(Bystander, RuleValidOnSmallInstances) {
  SplitMix64 rng(8);
  for (std::uint64_t t = 0; t < 30; ++t) {
    const auto cnf = sample(Universe::clauses(8, 3), EnsembleSpec::without_replacement(12), {5, t});
    EXPECT_TRUE(validate_bystander_rule(Sat{}, cnf, 100, rng));
    const auto g = sample(Universe::edges(10), EnsembleSpec::with_replacement(18), {6, t});
    EXPECT_TRUE(validate_bystander_rule(QCore{3}, g, 100, rng));
    EXPECT_TRUE(validate_bystander_rule(QColorable{3}, g, 100, rng));
  }
}

TEST(Bystander, RuleDetectsInvalidProperty) {
  // Size is not preserved by dropping bystanders.
  SplitMix64 rng(1);
  const ItemSequence seq(Universe::edges(4), {Item{0, 1}, Item{2, 3}});
  EXPECT_FALSE(validate_bystander_rule(SizeAtMost{1}, seq, 10, rng));
  const ItemSequence tri(Universe::edges(3), {Item{0, 1}, Item{1, 2}, Item{0, 2}});
  EXPECT_TRUE(validate_bystander_rule(SizeAtMost{0}, tri, 10, rng));  // no bystanders: vacuous
}
