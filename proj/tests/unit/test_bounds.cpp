#include <map>
#include <set>

#include <gtest/gtest.h>

#include "kwidth/bounds.hpp"

using namespace kwidth;

TEST(Bounds, GapBoundExamples) {
  EXPECT_EQ(theorem1_bound({0.5, 0.5, 0, 0.2, 0.25, 100}), 0.0);
  EXPECT_EQ(theorem1_bound({0.75, 0.5, 0.25, 0.2, 0.25, 100}), 0.0);
  EXPECT_EQ(theorem1_bound({0.75, 0.5, 0.5, 0.2, 0.25, 100}), 0.0);
  const double expected = (1.0 / 3) * std::sqrt(2 * M_PI * 1e4) * std::sqrt(0.14 * 0.25 * 0.75 / 0.86);
  const double got = theorem1_bound({2.0 / 3, 1.0 / 3, 0, 0.14, 0.25, 1e4});
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_GE(got, 14.59);
  EXPECT_LT(got, 14.60);
  EXPECT_THROW(theorem1_bound({1, 0, 0, 0, 0.25, 100}), std::invalid_argument);
  EXPECT_THROW(theorem1_bound({1, 0, 0, 1, 0.25, 100}), std::invalid_argument);
}

TEST(Bounds, GapBoundMonotone) {
  double prev = 0;
  for (double g = 0.05; g < 0.95; g += 0.05) {
    const double v = theorem1_bound({1, 0, 0, g, 0.3, 100});
    EXPECT_GT(v, prev);
    prev = v;
  }
  prev = 0;
  for (double b = 0.05; b <= 0.5; b += 0.05) {
    const double v = theorem1_bound({1, 0, 0, 0.3, b, 100});
    EXPECT_GT(v, prev);
    prev = v;
  }
  EXPECT_LT(theorem1_bound({1, 0, 0, 0.3, 0.3, 100}), theorem1_bound({1, 0, 0, 0.3, 0.3, 400}));
}

TEST(Bounds, KSatConstant) {
  const double c = corollary_constant(3, 0.3, 3.42, 4.571);
  EXPECT_NEAR(c, 0.0015, 0.00005);
  EXPECT_NEAR(c, 0.00153031, 1e-8);
  EXPECT_EQ(corollary3_bound({3, 0.3, 3.42, 4.571, 100}, 0.5, 0.5), 0.0);
  EXPECT_GT(corollary_constant(2, 0.3, 1, 1), 0.0);
  EXPECT_NEAR(corollary3_bound({3, 0.3, 3.42, 4.571, 200}, 2.0 / 3, 1.0 / 3), c / 3 * std::sqrt(200.0), 1e-15);
  EXPECT_THROW(corollary_constant(3, 0, 3.42, 4.571), std::invalid_argument);
  EXPECT_THROW(corollary_constant(3, 0.3, 5, 4), std::invalid_argument);
}

TEST(Bounds, DefaultRatios) {
  EXPECT_EQ(default_ratio_bounds(3).lower, 3.42);
  EXPECT_EQ(default_ratio_bounds(3).upper, 4.571);
  const RatioBounds r4 = default_ratio_bounds(4);
  EXPECT_NEAR(r4.lower, std::log(2.0) * 8 - (std::log(2.0) + 1) / 2, 1e-15);
  EXPECT_NEAR(r4.upper, std::log(2.0) * 16, 1e-15);
}

TEST(Bounds, KSatBoundComposesWhenBracketsCoincide) {
  for (std::uint32_t k : {2U, 3U, 4U, 5U}) {
    for (double c : {1.0, 3.42, 4.571}) {
      for (double t : {0.05, 0.3, 1.0}) {
        const double n = 1024;  // m / n stays bit-exact
        const double m = n * (c + t);
        const BoundInputs in{1, 0, 0, predicted_free_fraction(k, m, n), t / (c + t), m};
        EXPECT_NEAR(corollary3_bound({k, t, c, c, n}, 1, 0), theorem1_bound(in), 1e-12 * theorem1_bound(in));
      }
    }
  }
}

TEST(Bounds, KSatBoundComposesGeneralBrackets) {
  // Free fraction taken at the upper bracket, the item count and position
  // fraction at the lower bracket.
  const double c_lo = 3.42, c_hi = 4.571, t = 0.3, n = 1e4, scale = 1024;
  const double m = n * (c_lo + t);
  const BoundInputs in{1, 0, 0, predicted_free_fraction(3, scale * (c_hi + t), scale), t / (c_lo + t), m};
  const double b = corollary3_bound({3, t, c_lo, c_hi, n}, 1, 0);
  EXPECT_NEAR(b, theorem1_bound(in), 1e-12 * b);
}

TEST(Bounds, OptimizeT) {
  const TOptimum opt = optimize_t(3, 3.42, 4.571);
  EXPECT_GE(opt.constant, corollary_constant(3, 0.3, 3.42, 4.571));
  EXPECT_GE(opt.constant, 0.0015);
  EXPECT_NEAR(opt.t, 0.305962, 1e-4);
  for (double t : {opt.t * 0.9, opt.t * 1.1}) EXPECT_LE(corollary_constant(3, t, 3.42, 4.571), opt.constant);
  EXPECT_LT(corollary_constant(3, 1e-8, 3.42, 4.571), 1e-6);
  EXPECT_LT(corollary_constant(3, 1e3, 3.42, 4.571), 1e-6);
}

TEST(Bounds, ConsistencyCheck) {
  WidthEstimate w;
  w.width = 10;
  w.standard_error = 1;
  EXPECT_TRUE(consistency_check(w, 12.9).ok);
  EXPECT_FALSE(consistency_check(w, 13.1).ok);
  EXPECT_NEAR(consistency_check(w, 5).margin, 8, 1e-15);
}

TEST(Bounds, KeptSetComposition) {
  const std::vector<Item> items{Item{0, 1}, Item{1, 2}, Item{2, 3}, Item{3, 4}};
  const std::vector<bool> by{true, false, false, true};
  const std::vector<std::uint32_t> tau{1, 3, 0, 2};
  // b = 2: tags 1 (relevant), 3 (bystander) -> first relevant, first bystander
  const auto kept = kept_set(items, by, tau, 2);
  ASSERT_EQ(kept.size(), 2U);
  EXPECT_EQ(kept[0], items[0]);
  EXPECT_EQ(kept[1], items[1]);
  EXPECT_TRUE(kept_set(items, by, tau, 0).empty());
  EXPECT_THROW(kept_set(items, by, tau, 5), std::invalid_argument);
}

TEST(Bounds, KeptSetUniformByEnumeration) {
  // 6-item universe, m = 4 ordered draws, every tag permutation: the kept set
  // of size b is a uniform b-subset of the universe.
  const Universe u = Universe::edges(4);
  const std::uint64_t total = u.size64();
  for (std::size_t b = 1; b <= 3; ++b) {
    std::map<std::set<std::uint64_t>, std::uint64_t> counts;
    std::vector<std::uint64_t> pick(4);
    for (pick[0] = 0; pick[0] < total; ++pick[0])
      for (pick[1] = 0; pick[1] < total; ++pick[1])
        for (pick[2] = 0; pick[2] < total; ++pick[2])
          for (pick[3] = 0; pick[3] < total; ++pick[3]) {
            if (std::set<std::uint64_t>(pick.begin(), pick.end()).size() != 4) continue;
            std::vector<Item> items;
            for (auto r : pick) items.push_back(item_from_rank(u, r));
            const auto by = partially_free_flags(u, items);
            std::vector<std::uint32_t> tau{0, 1, 2, 3};
            do {
              std::set<std::uint64_t> key;
              for (const Item& it : kept_set(items, by, tau, b)) key.insert(rank_of_item(u, it));
              ++counts[key];
            } while (std::next_permutation(tau.begin(), tau.end()));
          }
    const std::uint64_t subsets = b == 1 ? 6 : (b == 2 ? 15 : 20);
    ASSERT_EQ(counts.size(), subsets);
    const std::uint64_t first = counts.begin()->second;
    for (const auto& [key, c] : counts) EXPECT_EQ(c, first);
  }
}

TEST(Bounds, TaggingSmall) {
  const TaggingReport rep = tagging_experiment(TwoSat{}, Universe::clauses(8, 2), EnsembleMode::WithoutReplacement,
                                               20, 5, 15, 2000, 3, 1);
  ASSERT_EQ(rep.rows.size(), 11U);
  for (const auto& row : rep.rows) {
    EXPECT_TRUE(row.within) << row.b;
    EXPECT_GT(row.mean_bound, 0.0);
  }
  EXPECT_GT(rep.mean_relevant, 0.0);
  EXPECT_LE(rep.mean_relevant, 20.0);
}

TEST(Bounds, TaggingConstantPropertyHasZeroDifference) {
  const TaggingReport rep = tagging_experiment(SizeAtMost{100}, Universe::edges(8), EnsembleMode::WithoutReplacement,
                                               10, 1, 10, 200, 1, 1);
  for (const auto& row : rep.rows) EXPECT_EQ(row.mean_diff, 0.0);
}

TEST(Bounds, TaggingValidation) {
  EXPECT_THROW(tagging_experiment(TwoSat{}, Universe::clauses(100, 2), EnsembleMode::WithoutReplacement, 20, 5, 15, 10, 1),
               std::invalid_argument);
  EXPECT_THROW(tagging_experiment(TwoSat{}, Universe::clauses(8, 2), EnsembleMode::Bernoulli, 20, 5, 15, 10, 1),
               std::invalid_argument);
  EXPECT_THROW(tagging_experiment(TwoSat{}, Universe::clauses(8, 2), EnsembleMode::WithoutReplacement, 20, 0, 15, 10, 1),
               std::invalid_argument);
}
