#pragma once

#include <algorithm>
#include <vector>

#include "kwidth/kwidth.hpp"
#include "oracles.hpp"

namespace fixture {

inline kwidth::Item to_item(oracle::Clause c) {
  std::sort(c.begin(), c.end(), [](const oracle::Lit& a, const oracle::Lit& b) { return a.var < b.var; });
  std::vector<std::uint32_t> slots;
  std::uint32_t mask = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    slots.push_back(c[j].var);
    if (c[j].neg) mask |= 1U << j;
  }
  return kwidth::Item(std::span<const std::uint32_t>(slots), mask);
}

inline std::vector<kwidth::Item> to_items(const std::vector<oracle::Clause>& cnf) {
  std::vector<kwidth::Item> out;
  for (const auto& c : cnf) out.push_back(to_item(c));
  return out;
}

inline std::vector<kwidth::Item> to_items(const std::vector<oracle::Edge>& edges) {
  std::vector<kwidth::Item> out;
  for (auto [a, b] : edges) out.push_back(kwidth::Item{a, b});
  return out;
}

inline std::vector<oracle::Clause> to_cnf(const kwidth::ItemSequence& seq) {
  std::vector<oracle::Clause> cnf;
  for (const auto& item : seq.items) {
    oracle::Clause c;
    for (std::size_t j = 0; j < item.arity(); ++j) c.push_back({item.slot(j), item.negated(j)});
    cnf.push_back(c);
  }
  return cnf;
}

inline std::vector<oracle::Edge> to_edges(const kwidth::ItemSequence& seq) {
  std::vector<oracle::Edge> edges;
  for (const auto& item : seq.items) edges.emplace_back(item.slot(0), item.slot(1));
  return edges;
}

}  // namespace fixture
