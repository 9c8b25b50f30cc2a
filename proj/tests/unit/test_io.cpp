#include <sstream>

#include <gtest/gtest.h>

#include "kwidth/io.hpp"

using namespace kwidth;

TEST(Io, DimacsRoundTrip) {
  const auto seq = sample(Universe::clauses(30, 3), EnsembleSpec::without_replacement(40), {1, 2});
  std::stringstream s;
  write_dimacs(s, seq, {"hello"});
  const std::string text = s.str();
  EXPECT_EQ(text.rfind("c hello\np cnf 30 40\n", 0), 0U);
  const ItemSequence back = read_dimacs(s);
  EXPECT_EQ(back.universe, seq.universe);
  EXPECT_EQ(back.items, seq.items);
  std::stringstream again(text);
  EXPECT_EQ(read_instance(again).items, seq.items);
}

TEST(Io, DimacsLiteralFormat) {
  const ItemSequence seq(Universe::clauses(3, 2), {Item({0, 2}, 0b10)});
  std::stringstream s;
  write_dimacs(s, seq);
  EXPECT_EQ(s.str(), "p cnf 3 1\n1 -3 0\n");
}

TEST(Io, DimacsCanonicalisesOrder) {
  std::stringstream s("p cnf 4 1\n-3 1 0\n");
  const auto seq = read_dimacs(s);
  ASSERT_EQ(seq.size(), 1U);
  EXPECT_EQ(seq[0], Item({0, 2}, 0b10));
}

TEST(Io, EdgeListRoundTrip) {
  const auto seq = sample(Universe::edges(20), EnsembleSpec::with_replacement(30), {3, 3});
  std::stringstream s;
  write_edge_list(s, seq, {"x"});
  EXPECT_EQ(s.str().rfind("# x\n20 30\n", 0), 0U);
  const auto back = read_edge_list(s);
  EXPECT_EQ(back.items, seq.items);
  const auto hyper = sample(Universe::hyperedges(12, 3), EnsembleSpec::without_replacement(10), {3, 3});
  std::stringstream h;
  write_edge_list(h, hyper);
  const auto hb = read_instance(h);
  EXPECT_EQ(hb.universe, hyper.universe);
  EXPECT_EQ(hb.items, hyper.items);
}

TEST(Io, MalformedInputsRejected) {
  for (const char* text : {"p cnf 3 1\n1 1 0\n", "p cnf 3 1\n1 4 0\n", "p cnf 3 2\n1 2 0\n", "p cnf x 1\n",
                           "1 2 0\n", "p cnf 3 1\n1 2 3 0\n1 2 0\n"}) {
    std::stringstream s(text);
    EXPECT_THROW(read_dimacs(s), std::exception) << text;
  }
  for (const char* text : {"3 1\n0 0\n", "3 1\n0 5\n", "3 2\n0 1\n", "3 1\n0 1 2\n0 1\n"}) {
    std::stringstream s(text);
    EXPECT_THROW(read_edge_list(s), std::exception) << text;
  }
  EXPECT_THROW(write_dimacs(std::cout, ItemSequence(Universe::edges(3))), std::invalid_argument);
}
