#include <gtest/gtest.h>

#include "kwidth/properties.hpp"
#include "kwidth/ensembles.hpp"
#include "support/fixtures.hpp"

using namespace kwidth;

namespace {

Item lit_clause(std::initializer_list<int> lits) {
  oracle::Clause c;
  for (int l : lits) c.push_back({static_cast<unsigned>(std::abs(l) - 1), l < 0});
  return fixture::to_item(c);
}

}  // namespace

TEST(Properties, ParseAndPrint) {
  for (const char* text : {"sat", "2sat", "qcore:3", "qcolor:4", "cost:2:9", "size:420"}) {
    EXPECT_EQ(to_string(parse_property(text)), text);
  }
  EXPECT_THROW(parse_property("qcore:1"), std::invalid_argument);
  EXPECT_THROW(parse_property("cost:5:2"), std::invalid_argument);
  EXPECT_THROW(parse_property("bogus"), std::invalid_argument);
  EXPECT_THROW(parse_property("sat:1"), std::invalid_argument);
}

TEST(Properties, DpllTrivialCases) {
  const Universe u = Universe::clauses(3, 1);
  const auto empty = solve_dpll(u, {});
  EXPECT_TRUE(empty.satisfiable);
  EXPECT_EQ(empty.recursive_calls, 1U);
  const std::vector<Item> contradiction{Item({0}, 0), Item({0}, 1)};
  EXPECT_FALSE(solve_dpll(u, contradiction).satisfiable);
  EXPECT_FALSE(solve_lookahead(u, contradiction));
}

TEST(Properties, PureLiteralCounted) {
  const Universe u = Universe::clauses(3, 2);
  const std::vector<Item> f{lit_clause({1, 2}), lit_clause({1, -3})};
  const auto st = solve_dpll(u, f);
  EXPECT_TRUE(st.satisfiable);
  EXPECT_GE(st.pure_literal_eliminations, 1U);
}

TEST(Properties, DpllMatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 600; ++i) {
    const unsigned n = 4 + static_cast<unsigned>(rng() % 11);  // 4..14
    const unsigned k = 3;
    const unsigned m = static_cast<unsigned>(n * (3.0 + (rng() % 300) / 100.0));
    const auto cnf = oracle::random_cnf(rng, n, k, m);
    const auto items = fixture::to_items(cnf);
    const Universe u = Universe::clauses(n, k);
    const bool truth = oracle::brute_sat(n, cnf);
    const auto st = solve_dpll(u, items);
    ASSERT_EQ(st.satisfiable, truth) << "instance " << i;
    ASSERT_GE(st.recursive_calls, 1U);
    ASSERT_EQ(solve_lookahead(u, items), truth) << "instance " << i;
  }
}

TEST(Properties, TwoSatMatchesBruteForce) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 600; ++i) {
    const unsigned n = 3 + static_cast<unsigned>(rng() % 12);
    const unsigned m = static_cast<unsigned>(n * (0.5 + (rng() % 150) / 100.0));
    const auto cnf = oracle::random_cnf(rng, n, 2, m);
    const auto items = fixture::to_items(cnf);
    const Universe u = Universe::clauses(n, 2);
    const bool truth = oracle::brute_sat(n, cnf);
    ASSERT_EQ(solve_2sat(u, items), truth) << "instance " << i;
    ASSERT_EQ(solve_dpll(u, items).satisfiable, truth);
  }
}

TEST(Properties, TwoSatExamples) {
  const Universe u = Universe::clauses(2, 2);
  EXPECT_TRUE(solve_2sat(u, std::vector<Item>{lit_clause({1, 2}), lit_clause({-1, 2})}));
  const Universe u3 = Universe::clauses(3, 2);
  // x1 -> x2 -> x3 -> not x1 forces not x1; (x1 or x3) and (x1 or not x3) forces x1
  const std::vector<Item> chain{lit_clause({-1, 2}), lit_clause({-2, 3}), lit_clause({-3, -1}), lit_clause({1, 3}),
                                lit_clause({1, -3})};
  EXPECT_FALSE(solve_2sat(u3, chain));
  EXPECT_THROW(solve_2sat(Universe::clauses(3, 3), std::vector<Item>{}), std::invalid_argument);
}

TEST(Properties, LookaheadLargerInstancesAgreeWithDpll) {
  for (std::uint64_t t = 0; t < 40; ++t) {
    const auto seq = sample(Universe::clauses(40, 3), EnsembleSpec::without_replacement(170), {12, t});
    ASSERT_EQ(solve_lookahead(seq.universe, seq.view()), solve_dpll(seq).satisfiable);
  }
}

TEST(Properties, FirstUnsatisfiablePrefixMatchesLinearScan) {
  const Universe u = Universe::clauses(25, 3);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto seq = sample(u, EnsembleSpec::without_replacement(160), {3, t});
    std::uint64_t expected = seq.size() + 1;
    for (std::uint64_t j = 1; j <= seq.size(); ++j) {
      if (!solve_dpll(u, seq.view().first(j)).satisfiable) {
        expected = j;
        break;
      }
    }
    ASSERT_EQ(first_unsatisfiable_prefix(u, seq.view()), expected);
  }
  const auto short_seq = sample(u, EnsembleSpec::without_replacement(5), {3, 0});
  EXPECT_EQ(first_unsatisfiable_prefix(u, short_seq.view()), 6U);
}

TEST(Properties, CoreExamples) {
  const Universe u = Universe::edges(5);
  EXPECT_TRUE(has_q_core(u, std::vector<Item>{Item{0, 1}, Item{1, 2}, Item{0, 2}}, 2));
  EXPECT_FALSE(has_q_core(u, std::vector<Item>{Item{0, 1}, Item{1, 2}, Item{2, 3}, Item{2, 4}}, 2));
  const std::vector<Item> k4{Item{0, 1}, Item{0, 2}, Item{0, 3}, Item{1, 2}, Item{1, 3}, Item{2, 3}};
  EXPECT_TRUE(has_q_core(u, k4, 3));
  EXPECT_FALSE(has_q_core(u, k4, 4));
  EXPECT_TRUE(has_q_core(u, std::vector<Item>{Item{0, 1}, Item{0, 1}}, 2));  // multiplicity counts
}

TEST(Properties, CoreMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 400; ++i) {
    const unsigned n = 3 + static_cast<unsigned>(rng() % 8);
    const unsigned m = static_cast<unsigned>(rng() % (2 * n + 1));
    const auto edges = oracle::random_graph(rng, n, m);
    const unsigned q = 2 + static_cast<unsigned>(rng() % 2);
    ASSERT_EQ(has_q_core(Universe::edges(n), fixture::to_items(edges), q), oracle::brute_core(n, edges, q));
  }
}

TEST(Properties, ColoringExamples) {
  const Universe u = Universe::edges(5);
  const std::vector<Item> k4{Item{0, 1}, Item{0, 2}, Item{0, 3}, Item{1, 2}, Item{1, 3}, Item{2, 3}};
  EXPECT_FALSE(q_colorable(u, k4, 3));
  EXPECT_TRUE(q_colorable(u, k4, 4));
  const std::vector<Item> c5{Item{0, 1}, Item{1, 2}, Item{2, 3}, Item{3, 4}, Item{0, 4}};
  EXPECT_FALSE(q_colorable(u, c5, 2));
  EXPECT_TRUE(q_colorable(u, c5, 3));
  EXPECT_TRUE(q_colorable(Universe::edges(200), std::vector<Item>{}, 3));
  std::vector<Item> path;
  for (std::uint32_t v = 0; v + 1 < 200; ++v) path.push_back(Item{v, v + 1});
  EXPECT_THROW(q_colorable(Universe::edges(200), path, 3), std::length_error);
}

TEST(Properties, ColoringMatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 300; ++i) {
    const unsigned n = 3 + static_cast<unsigned>(rng() % 7);  // up to 9
    const unsigned m = static_cast<unsigned>(rng() % (3 * n));
    const auto edges = oracle::random_graph(rng, n, m);
    const unsigned q = 2 + static_cast<unsigned>(rng() % 2);
    ASSERT_EQ(q_colorable(Universe::edges(n), fixture::to_items(edges), q), oracle::brute_colorable(n, edges, q));
  }
}

TEST(Properties, EvaluateDispatch) {
  const Universe u = Universe::clauses(10, 3);
  const auto seq = sample(u, EnsembleSpec::without_replacement(11), {1, 1});
  EXPECT_TRUE(evaluate(SizeAtMost{10}, u, seq.view().first(10)));
  EXPECT_FALSE(evaluate(SizeAtMost{10}, seq));
  EXPECT_TRUE(evaluate(Sat{}, ItemSequence(u)));
  EXPECT_THROW(evaluate(QCore{2}, seq), std::invalid_argument);
  EXPECT_THROW(evaluate(TwoSat{}, seq), std::invalid_argument);
  EXPECT_THROW(evaluate(QColorable{3}, ItemSequence(Universe::hyperedges(5, 3))), std::invalid_argument);
  const auto calls = solve_dpll(seq).recursive_calls;
  EXPECT_TRUE(evaluate(SolverCostInRange{calls, calls}, seq));
  EXPECT_FALSE(evaluate(SolverCostInRange{calls + 1, calls + 5}, seq));
}

TEST(Properties, TwoSatAgreesWithSat) {
  for (std::uint64_t t = 0; t < 100; ++t) {
    const auto seq = sample(Universe::clauses(30, 2), EnsembleSpec::without_replacement(30), {4, t});
    ASSERT_EQ(evaluate(TwoSat{}, seq), evaluate(Sat{}, seq));
  }
}

TEST(Properties, OrderAndDuplicateInvariance) {
  std::mt19937_64 rng(3);
  const std::vector<std::pair<PropertyKind, Universe>> cases{
      {Sat{}, Universe::clauses(12, 3)}, {TwoSat{}, Universe::clauses(12, 2)},
      {QCore{2}, Universe::edges(12)}, {QColorable{3}, Universe::edges(12)}};
  for (const auto& [prop, u] : cases) {
    const std::uint64_t m = u.kind() == ItemKind::Clause ? (u.k() == 3 ? 50 : 12) : 16;
    for (std::uint64_t t = 0; t < 50; ++t) {
      auto items = sample(u, EnsembleSpec::without_replacement(m), {8, t}).items;
      const bool base = evaluate(prop, u, items);
      auto shuffled = items;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      ASSERT_EQ(evaluate(prop, u, shuffled), base);
      if (!std::holds_alternative<QCore>(prop)) {
        auto dup = items;
        dup.push_back(items[rng() % items.size()]);
        ASSERT_EQ(evaluate(prop, u, dup), base);
      }
    }
  }
}

TEST(Properties, MonotoneAlongPrefixes) {
  const std::vector<std::pair<PropertyKind, Universe>> cases{
      {Sat{}, Universe::clauses(12, 3)}, {TwoSat{}, Universe::clauses(20, 2)},
      {QCore{2}, Universe::edges(12)}, {QColorable{3}, Universe::edges(10)}};
  for (const auto& [prop, u] : cases) {
    const bool increasing = monotonicity(prop) == Monotonicity::Increasing;
    const std::uint64_t m = u.kind() == ItemKind::Clause ? (u.k() == 3 ? 70 : 35) : 30;
    for (std::uint64_t t = 0; t < 30; ++t) {
      const auto seq = sample(u, EnsembleSpec::with_replacement(m), {6, t});
      bool prev = evaluate(prop, u, seq.view().first(0));
      for (std::uint64_t j = 1; j <= m; ++j) {
        const bool cur = evaluate(prop, u, seq.view().first(j));
        ASSERT_FALSE(increasing ? (prev && !cur) : (!prev && cur));
        prev = cur;
      }
    }
  }
}
