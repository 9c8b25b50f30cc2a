#pragma once

// DIMACS CNF for clause sequences, whitespace edge lists for (hyper)graphs.
//
//   DIMACS:    "p cnf <n> <m>", then 1-indexed signed literals, 0-terminated.
//   edge list: "<n> <m>", then one 0-indexed vertex tuple per line.
//
// Writers accept optional comment lines ("c ..." / "# ...") placed before the
// header. Readers skip such comments.

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwidth/ensembles.hpp"

namespace kwidth {

inline void write_dimacs(std::ostream& out, const ItemSequence& seq, const std::vector<std::string>& comments = {}) {
  if (!seq.universe.is_signed()) throw std::invalid_argument("DIMACS export needs clause items");
  for (const auto& line : comments) out << "c " << line << '\n';
  out << "p cnf " << seq.universe.n() << ' ' << seq.size() << '\n';
  for (const Item& item : seq.items) {
    for (std::size_t j = 0; j < item.arity(); ++j) {
      if (item.negated(j)) out << '-';
      out << (item.slot(j) + 1) << ' ';
    }
    out << "0\n";
  }
}

inline void write_edge_list(std::ostream& out, const ItemSequence& seq, const std::vector<std::string>& comments = {}) {
  if (seq.universe.is_signed()) throw std::invalid_argument("edge-list export needs edge or hyperedge items");
  for (const auto& line : comments) out << "# " << line << '\n';
  out << seq.universe.n() << ' ' << seq.size() << '\n';
  for (const Item& item : seq.items) {
    for (std::size_t j = 0; j < item.arity(); ++j) {
      if (j > 0) out << ' ';
      out << item.slot(j);
    }
    out << '\n';
  }
}

namespace detail {

inline long long parse_integer(const std::string& token, std::size_t line_no) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": expected an integer, got '" + token + "'");
  }
  return value;
}

inline Item canonical_item(std::vector<std::pair<std::uint32_t, bool>> literals, std::size_t line_no) {
  std::sort(literals.begin(), literals.end());
  std::vector<std::uint32_t> slots;
  std::uint32_t signs = 0;
  for (std::size_t j = 0; j < literals.size(); ++j) {
    if (j > 0 && literals[j].first == literals[j - 1].first) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": repeated variable/vertex within one item");
    }
    slots.push_back(literals[j].first);
    if (literals[j].second) signs |= 1U << j;
  }
  if (slots.size() > kMaxArity) throw std::runtime_error("line " + std::to_string(line_no) + ": item arity too large");
  return Item(std::span<const std::uint32_t>(slots), signs);
}

}  // namespace detail

// All clauses must have the same length and distinct variables.
inline ItemSequence read_dimacs(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long n = -1;
  long long declared = -1;
  std::vector<Item> items;
  std::vector<std::pair<std::uint32_t, bool>> pending;
  std::size_t pending_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first) || first[0] == 'c' || first[0] == '%') continue;
    if (first == "p") {
      std::string format, vars, clauses;
      if (!(tokens >> format >> vars >> clauses) || format != "cnf") {
        throw std::runtime_error("line " + std::to_string(line_no) + ": malformed 'p cnf' header");
      }
      n = detail::parse_integer(vars, line_no);
      declared = detail::parse_integer(clauses, line_no);
      continue;
    }
    if (n < 0) throw std::runtime_error("line " + std::to_string(line_no) + ": clause before 'p cnf' header");
    std::string token = first;
    do {
      const long long lit = detail::parse_integer(token, line_no);
      if (lit == 0) {
        items.push_back(detail::canonical_item(std::move(pending), pending_line));
        pending.clear();
        continue;
      }
      if (std::llabs(lit) > n) throw std::runtime_error("line " + std::to_string(line_no) + ": literal out of range");
      if (pending.empty()) pending_line = line_no;
      pending.emplace_back(static_cast<std::uint32_t>(std::llabs(lit) - 1), lit < 0);
    } while (tokens >> token);
  }
  if (n < 0) throw std::runtime_error("missing 'p cnf' header");
  if (!pending.empty()) throw std::runtime_error("unterminated clause at end of input");
  if (declared >= 0 && static_cast<std::size_t>(declared) != items.size()) {
    throw std::runtime_error("header declares " + std::to_string(declared) + " clauses, found " +
                             std::to_string(items.size()));
  }
  std::uint32_t k = items.empty() ? 1U : static_cast<std::uint32_t>(items.front().arity());
  for (const Item& item : items) {
    if (item.arity() != k) throw std::runtime_error("mixed clause lengths are not supported");
  }
  if (k == 0) throw std::runtime_error("empty clause");
  if (static_cast<long long>(k) > n) throw std::runtime_error("clause length exceeds variable count");
  return ItemSequence(Universe::clauses(static_cast<std::uint32_t>(n), k), std::move(items));
}

// Arity is taken from the first item line; two-vertex lines give an Edge universe.
inline ItemSequence read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  long long n = -1;
  long long declared = -1;
  std::vector<Item> items;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<std::string> fields;
    for (std::string t; tokens >> t;) fields.push_back(t);
    if (fields.empty() || fields[0][0] == '#') continue;
    if (n < 0) {
      if (fields.size() != 2) throw std::runtime_error("line " + std::to_string(line_no) + ": expected 'n m' header");
      n = detail::parse_integer(fields[0], line_no);
      declared = detail::parse_integer(fields[1], line_no);
      continue;
    }
    std::vector<std::pair<std::uint32_t, bool>> vertices;
    for (const auto& f : fields) {
      const long long v = detail::parse_integer(f, line_no);
      if (v < 0 || v >= n) throw std::runtime_error("line " + std::to_string(line_no) + ": vertex out of range");
      vertices.emplace_back(static_cast<std::uint32_t>(v), false);
    }
    items.push_back(detail::canonical_item(std::move(vertices), line_no));
  }
  if (n < 0) throw std::runtime_error("missing 'n m' header");
  if (static_cast<std::size_t>(declared) != items.size()) {
    throw std::runtime_error("header declares " + std::to_string(declared) + " items, found " +
                             std::to_string(items.size()));
  }
  const auto k = items.empty() ? 2U : static_cast<std::uint32_t>(items.front().arity());
  for (const Item& item : items) {
    if (item.arity() != k) throw std::runtime_error("mixed edge arities are not supported");
  }
  const ItemKind kind = k == 2 ? ItemKind::Edge : ItemKind::Hyperedge;
  return ItemSequence(Universe(kind, static_cast<std::uint32_t>(n), k), std::move(items));
}

// Dispatches on the presence of a "p cnf" header.
inline ItemSequence read_instance(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream again(text);
  std::string line;
  while (std::getline(again, line)) {
    std::istringstream tokens(line);
    std::string first;
    if (!(tokens >> first)) continue;
    if (first == "p") {
      std::istringstream dimacs(text);
      return read_dimacs(dimacs);
    }
    if (first[0] == 'c' || first[0] == '#') continue;
    break;
  }
  std::istringstream edges(text);
  return read_edge_list(edges);
}

}  // namespace kwidth
