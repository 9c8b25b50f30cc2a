#pragma once

// Deciders for the set properties whose transitions we measure:
// satisfiability (DPLL with unit propagation and the pure-literal rule),
// 2-SAT via implication-graph SCCs, q-core existence by peeling, exact
// q-colorability, a solver-cost window, and the trivial size threshold.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "kwidth/ensembles.hpp"
#include "kwidth/lookahead.hpp"
#include "kwidth/universe.hpp"

namespace kwidth {

struct Sat {
  friend bool operator==(const Sat&, const Sat&) = default;
};
struct TwoSat {
  friend bool operator==(const TwoSat&, const TwoSat&) = default;
};
struct QCore {
  unsigned q = 3;
  friend bool operator==(const QCore&, const QCore&) = default;
};
struct QColorable {
  unsigned q = 3;
  friend bool operator==(const QColorable&, const QColorable&) = default;
};
// L <= recursive DPLL calls <= U. Not monotone in m.
struct SolverCostInRange {
  std::uint64_t lower = 0;
  std::uint64_t upper = 0;
  friend bool operator==(const SolverCostInRange&, const SolverCostInRange&) = default;
};
// "number of items <= threshold"; the width-1 reference property.
struct SizeAtMost {
  std::uint64_t threshold = 0;
  friend bool operator==(const SizeAtMost&, const SizeAtMost&) = default;
};

using PropertyKind = std::variant<Sat, TwoSat, QCore, QColorable, SolverCostInRange, SizeAtMost>;

enum class Monotonicity { Decreasing, Increasing, None };

inline Monotonicity monotonicity(const PropertyKind& property) {
  if (std::holds_alternative<QCore>(property)) return Monotonicity::Increasing;
  if (std::holds_alternative<SolverCostInRange>(property)) return Monotonicity::None;
  return Monotonicity::Decreasing;
}

inline std::string to_string(const PropertyKind& property) {
  struct {
    std::string operator()(const Sat&) const { return "sat"; }
    std::string operator()(const TwoSat&) const { return "2sat"; }
    std::string operator()(const QCore& p) const { return "qcore:" + std::to_string(p.q); }
    std::string operator()(const QColorable& p) const { return "qcolor:" + std::to_string(p.q); }
    std::string operator()(const SolverCostInRange& p) const {
      return "cost:" + std::to_string(p.lower) + ":" + std::to_string(p.upper);
    }
    std::string operator()(const SizeAtMost& p) const { return "size:" + std::to_string(p.threshold); }
  } visitor;
  return std::visit(visitor, property);
}

namespace detail {

inline std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t value = 0;
  if (text.empty()) throw std::invalid_argument("missing " + std::string(what));
  for (char ch : text) {
    if (ch < '0' || ch > '9') throw std::invalid_argument("bad " + std::string(what) + " '" + std::string(text) + "'");
    value = value * 10 + static_cast<std::uint64_t>(ch - '0');
  }
  return value;
}

}  // namespace detail

// sat | 2sat | qcore:q | qcolor:q | cost:L:U | size:T
inline PropertyKind parse_property(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  auto need_q = [&](std::string_view what) {
    const auto q = detail::parse_u64(rest, what);
    if (q < 2) throw std::invalid_argument(std::string(what) + " must be at least 2");
    return static_cast<unsigned>(q);
  };
  if (head == "sat" && rest.empty()) return Sat{};
  if (head == "2sat" && rest.empty()) return TwoSat{};
  if (head == "qcore") return QCore{need_q("q-core order")};
  if (head == "qcolor") return QColorable{need_q("color count")};
  if (head == "size") return SizeAtMost{detail::parse_u64(rest, "size threshold")};
  if (head == "cost") {
    const auto sep = rest.find(':');
    if (sep == std::string_view::npos) throw std::invalid_argument("cost property needs cost:L:U");
    const auto lower = detail::parse_u64(rest.substr(0, sep), "cost lower bound");
    const auto upper = detail::parse_u64(rest.substr(sep + 1), "cost upper bound");
    if (lower > upper) throw std::invalid_argument("cost property needs L <= U");
    return SolverCostInRange{lower, upper};
  }
  throw std::invalid_argument("unknown property '" + std::string(text) + "'");
}

struct SolveStats {
  std::uint64_t recursive_calls = 0;
  std::uint64_t pure_literal_eliminations = 0;
  std::uint64_t unit_propagations = 0;
  bool satisfiable = false;
};

namespace detail {

// Counter-based DPLL. Literal code 2v is x_v, 2v+1 is its negation.
// recursive_calls counts search nodes, the root included.
class Dpll {
 public:
  Dpll(std::uint32_t n, std::span<const Item> clauses) : n_{n}, occurs_(2 * std::size_t{n}) {
    starts_.reserve(clauses.size() + 1);
    starts_.push_back(0);
    for (const Item& c : clauses) {
      for (std::size_t j = 0; j < c.arity(); ++j) lits_.push_back(2 * c.slot(j) + (c.negated(j) ? 1U : 0U));
      starts_.push_back(static_cast<std::uint32_t>(lits_.size()));
    }
    const std::size_t count = clauses.size();
    sat_count_.assign(count, 0);
    free_count_.resize(count);
    active_occ_.assign(2 * std::size_t{n}, 0);
    value_.assign(n, kUnassigned);
    moms_.assign(2 * std::size_t{n}, 0);
    unsatisfied_ = static_cast<std::uint32_t>(count);
    for (std::uint32_t c = 0; c < count; ++c) {
      free_count_[c] = starts_[c + 1] - starts_[c];
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) {
        occurs_[lits_[i]].push_back(c);
        ++active_occ_[lits_[i]];
      }
      if (free_count_[c] == 0) conflict_ = true;
      if (free_count_[c] == 1) units_.push_back(c);
    }
  }

  SolveStats run() {
    stats_ = {};
    stats_.satisfiable = node();
    return stats_;
  }

 private:
  static constexpr std::int8_t kUnassigned = -1;

  bool is_true(std::uint32_t lit) const { return value_[lit >> 1] == static_cast<std::int8_t>((lit & 1U) ^ 1U); }

  void assign(std::uint32_t lit) {
    value_[lit >> 1] = static_cast<std::int8_t>((lit & 1U) ^ 1U);
    trail_.push_back(lit);
    for (std::uint32_t c : occurs_[lit]) {
      if (sat_count_[c]++ == 0) {
        --unsatisfied_;
        for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) --active_occ_[lits_[i]];
      }
    }
    for (std::uint32_t c : occurs_[lit ^ 1U]) {
      --free_count_[c];
      if (sat_count_[c] == 0) {
        if (free_count_[c] == 0) {
          conflict_ = true;
        } else if (free_count_[c] == 1) {
          units_.push_back(c);
        }
      }
    }
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const std::uint32_t lit = trail_.back();
      trail_.pop_back();
      for (std::uint32_t c : occurs_[lit ^ 1U]) ++free_count_[c];
      for (std::uint32_t c : occurs_[lit]) {
        if (--sat_count_[c] == 0) {
          ++unsatisfied_;
          for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) ++active_occ_[lits_[i]];
        }
      }
      value_[lit >> 1] = kUnassigned;
    }
    units_.clear();
    conflict_ = false;
  }

  // Returns false on conflict.
  bool propagate() {
    while (!conflict_ && !units_.empty()) {
      const std::uint32_t c = units_.back();
      units_.pop_back();
      if (sat_count_[c] != 0) continue;
      std::uint32_t unit = 0;
      bool found = false;
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) {
        if (value_[lits_[i] >> 1] == kUnassigned) {
          unit = lits_[i];
          found = true;
          break;
        }
      }
      if (!found) {
        conflict_ = true;
        break;
      }
      ++stats_.unit_propagations;
      assign(unit);
    }
    units_.clear();
    return !conflict_;
  }

  // Pure literals only satisfy clauses, so they never create units or
  // conflicts; repeat until no literal is pure.
  void eliminate_pure_literals() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::uint32_t v = 0; v < n_; ++v) {
        if (value_[v] != kUnassigned) continue;
        const std::uint32_t pos = active_occ_[2 * v];
        const std::uint32_t neg = active_occ_[2 * v + 1];
        if ((pos == 0) == (neg == 0)) continue;
        assign(pos > 0 ? 2 * v : 2 * v + 1);
        ++stats_.pure_literal_eliminations;
        changed = true;
      }
    }
    units_.clear();
  }

  // Most occurrences among the shortest unsatisfied clauses; ties to the
  // smaller variable index. The more frequent polarity is tried first.
  std::uint32_t choose_branch_literal() {
    std::uint32_t shortest = std::numeric_limits<std::uint32_t>::max();
    for (std::size_t c = 0; c < sat_count_.size(); ++c) {
      if (sat_count_[c] == 0) shortest = std::min(shortest, free_count_[c]);
    }
    std::fill(moms_.begin(), moms_.end(), 0U);
    for (std::size_t c = 0; c < sat_count_.size(); ++c) {
      if (sat_count_[c] != 0 || free_count_[c] != shortest) continue;
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) {
        if (value_[lits_[i] >> 1] == kUnassigned) ++moms_[lits_[i]];
      }
    }
    std::uint32_t best_var = n_;
    std::uint32_t best_score = 0;
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (value_[v] != kUnassigned) continue;
      const std::uint32_t score = moms_[2 * v] + moms_[2 * v + 1];
      if (best_var == n_ || score > best_score) {
        best_var = v;
        best_score = score;
      }
    }
    return moms_[2 * best_var] >= moms_[2 * best_var + 1] ? 2 * best_var : 2 * best_var + 1;
  }

  bool node() {
    ++stats_.recursive_calls;
    const std::size_t mark = trail_.size();
    if (!propagate()) {
      undo(mark);
      return false;
    }
    eliminate_pure_literals();
    if (unsatisfied_ == 0) return true;
    const std::uint32_t lit = choose_branch_literal();
    for (std::uint32_t branch : {lit, lit ^ 1U}) {
      const std::size_t before = trail_.size();
      assign(branch);
      if (node()) return true;
      undo(before);
    }
    undo(mark);
    return false;
  }

  std::uint32_t n_;
  std::vector<std::uint32_t> lits_;
  std::vector<std::uint32_t> starts_;
  std::vector<std::vector<std::uint32_t>> occurs_;
  std::vector<std::uint32_t> sat_count_;
  std::vector<std::uint32_t> free_count_;
  std::vector<std::uint32_t> active_occ_;
  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::uint32_t> units_;
  std::vector<std::uint32_t> moms_;
  std::uint32_t unsatisfied_ = 0;
  bool conflict_ = false;
  SolveStats stats_;
};

inline void require_clauses(const Universe& u, std::string_view who) {
  if (u.kind() != ItemKind::Clause) throw std::invalid_argument(std::string(who) + " needs clause items");
}

inline void require_edges(const Universe& u, std::string_view who) {
  if (u.kind() != ItemKind::Edge) throw std::invalid_argument(std::string(who) + " needs graph edges");
}

}  // namespace detail

inline SolveStats solve_dpll(const Universe& u, std::span<const Item> formula) {
  detail::require_clauses(u, "solve_dpll");
  return detail::Dpll(u.n(), formula).run();
}

inline SolveStats solve_dpll(const ItemSequence& formula) { return solve_dpll(formula.universe, formula.view()); }

// Satisfiable iff no variable shares a strongly connected component of the
// implication graph with its negation. Iterative Tarjan, linear time.
inline bool solve_2sat(const Universe& u, std::span<const Item> formula) {
  detail::require_clauses(u, "solve_2sat");
  if (u.k() != 2) throw std::invalid_argument("solve_2sat needs 2-clauses");
  const std::uint32_t nodes = 2 * u.n();
  // (a or b): not a -> b, not b -> a
  std::vector<std::uint32_t> start(nodes + 1, 0);
  auto lit = [](const Item& c, std::size_t j) { return 2 * c.slot(j) + (c.negated(j) ? 1U : 0U); };
  for (const Item& c : formula) {
    ++start[(lit(c, 0) ^ 1U) + 1];
    ++start[(lit(c, 1) ^ 1U) + 1];
  }
  for (std::uint32_t v = 0; v < nodes; ++v) start[v + 1] += start[v];
  std::vector<std::uint32_t> adj(start.back());
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (const Item& c : formula) {
    const std::uint32_t a = lit(c, 0);
    const std::uint32_t b = lit(c, 1);
    adj[fill[a ^ 1U]++] = b;
    adj[fill[b ^ 1U]++] = a;
  }

  constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(nodes, kNone);
  std::vector<std::uint32_t> low(nodes, 0);
  std::vector<std::uint32_t> component(nodes, kNone);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> frames;  // (node, next edge)
  std::uint32_t counter = 0;
  std::uint32_t components = 0;
  for (std::uint32_t root = 0; root < nodes; ++root) {
    if (index[root] != kNone) continue;
    frames.emplace_back(root, start[root]);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    while (!frames.empty()) {
      auto& [v, edge] = frames.back();
      if (edge < start[v + 1]) {
        const std::uint32_t w = adj[edge++];
        if (index[w] == kNone) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          frames.emplace_back(w, start[w]);
        } else if (component[w] == kNone) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          component[w] = components;
        } while (w != done);
        ++components;
      }
    }
  }
  for (std::uint32_t v = 0; v < u.n(); ++v) {
    if (component[2 * v] == component[2 * v + 1]) return false;
  }
  return true;
}

inline bool solve_2sat(const ItemSequence& formula) { return solve_2sat(formula.universe, formula.view()); }

// Peels vertices of degree < q. Duplicate edges count toward degree.
inline bool has_q_core(const Universe& u, std::span<const Item> graph, unsigned q) {
  if (!u.is_graph()) throw std::invalid_argument("has_q_core needs edges or hyperedges");
  if (q < 2) throw std::invalid_argument("q-core order must be at least 2");
  const std::uint32_t n = u.n();
  std::vector<std::uint32_t> degree(n, 0);
  for (const Item& e : graph) {
    for (std::uint32_t v : e.slots()) ++degree[v];
  }
  std::vector<std::uint32_t> start(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) start[v + 1] = start[v] + degree[v];
  std::vector<std::uint32_t> incident(start.back());
  std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
  for (std::uint32_t e = 0; e < graph.size(); ++e) {
    for (std::uint32_t v : graph[e].slots()) incident[fill[v]++] = e;
  }
  std::vector<char> edge_alive(graph.size(), 1);
  std::vector<char> removed(n, 0);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (degree[v] < q) {
      removed[v] = 1;
      queue.push_back(v);
    }
  }
  std::size_t alive = graph.size();
  while (!queue.empty()) {
    const std::uint32_t v = queue.back();
    queue.pop_back();
    for (std::uint32_t i = start[v]; i < start[v + 1]; ++i) {
      const std::uint32_t e = incident[i];
      if (!edge_alive[e]) continue;
      edge_alive[e] = 0;
      --alive;
      for (std::uint32_t w : graph[e].slots()) {
        --degree[w];
        if (!removed[w] && degree[w] < q) {
          removed[w] = 1;
          queue.push_back(w);
        }
      }
    }
  }
  return alive > 0;
}

inline bool has_q_core(const ItemSequence& graph, unsigned q) { return has_q_core(graph.universe, graph.view(), q); }

// Exact search is exponential; graphs with more non-isolated vertices than
// this are rejected with std::length_error.
inline constexpr std::size_t kMaxColoringVertices = 128;

// Backtracking over vertices in decreasing degree order; a vertex may open at
// most one new color (symmetry breaking).
inline bool q_colorable(const Universe& u, std::span<const Item> graph, unsigned q) {
  detail::require_edges(u, "q_colorable");
  if (q == 0) return graph.empty();
  const std::uint32_t n = u.n();
  std::vector<std::vector<std::uint32_t>> adjacency(n);
  for (const Item& e : graph) {
    adjacency[e.slot(0)].push_back(e.slot(1));
    adjacency[e.slot(1)].push_back(e.slot(0));
  }
  std::vector<std::uint32_t> order;
  for (std::uint32_t v = 0; v < n; ++v) {
    auto& nb = adjacency[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    if (!nb.empty()) order.push_back(v);
  }
  if (order.size() > kMaxColoringVertices) {
    throw std::length_error("q_colorable: " + std::to_string(order.size()) + " non-isolated vertices exceeds limit of " +
                            std::to_string(kMaxColoringVertices));
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return adjacency[a].size() > adjacency[b].size(); });
  constexpr unsigned kNoColor = std::numeric_limits<unsigned>::max();
  std::vector<unsigned> color(n, kNoColor);

  auto search = [&](auto&& self, std::size_t pos, unsigned used) -> bool {
    if (pos == order.size()) return true;
    const std::uint32_t v = order[pos];
    const unsigned limit = std::min(q, used + 1);
    for (unsigned c = 0; c < limit; ++c) {
      bool clash = false;
      for (std::uint32_t w : adjacency[v]) {
        if (color[w] == c) {
          clash = true;
          break;
        }
      }
      if (clash) continue;
      color[v] = c;
      if (self(self, pos + 1, std::max(used, c + 1))) return true;
    }
    color[v] = kNoColor;
    return false;
  };
  return search(search, 0, 0);
}

inline bool q_colorable(const ItemSequence& graph, unsigned q) { return q_colorable(graph.universe, graph.view(), q); }

inline bool compatible(const PropertyKind& property, const Universe& u) {
  struct {
    const Universe& u;
    bool operator()(const Sat&) const { return u.kind() == ItemKind::Clause; }
    bool operator()(const TwoSat&) const { return u.kind() == ItemKind::Clause && u.k() == 2; }
    bool operator()(const QCore&) const { return u.is_graph(); }
    bool operator()(const QColorable&) const { return u.kind() == ItemKind::Edge; }
    bool operator()(const SolverCostInRange&) const { return u.kind() == ItemKind::Clause; }
    bool operator()(const SizeAtMost&) const { return true; }
  } visitor{u};
  return std::visit(visitor, property);
}

namespace detail {

inline std::vector<Item> distinct_items(const Universe& u, std::span<const Item> items) {
  std::unordered_set<std::uint64_t> seen;
  std::vector<Item> out;
  out.reserve(items.size());
  for (const Item& item : items) {
    if (seen.insert(fast_rank(u, item)).second) out.push_back(item);
  }
  return out;
}

}  // namespace detail

// Sat, TwoSat and QColorable ignore multiplicity by construction; the cost
// window is evaluated on the de-duplicated set so it too is a set property.
inline bool evaluate(const PropertyKind& property, const Universe& u, std::span<const Item> items) {
  if (!compatible(property, u)) {
    throw std::invalid_argument("property " + to_string(property) + " does not apply to " +
                                std::string(to_string(u.kind())) + " items with k=" + std::to_string(u.k()));
  }
  struct {
    const Universe& u;
    std::span<const Item> items;
    bool operator()(const Sat&) const { return solve_lookahead(u, items); }
    bool operator()(const TwoSat&) const { return solve_2sat(u, items); }
    bool operator()(const QCore& p) const { return has_q_core(u, items, p.q); }
    bool operator()(const QColorable& p) const { return q_colorable(u, items, p.q); }
    bool operator()(const SolverCostInRange& p) const {
      const auto calls = solve_dpll(u, detail::distinct_items(u, items)).recursive_calls;
      return p.lower <= calls && calls <= p.upper;
    }
    bool operator()(const SizeAtMost& p) const { return items.size() <= p.threshold; }
  } visitor{u, items};
  return std::visit(visitor, property);
}

inline bool evaluate(const PropertyKind& property, const ItemSequence& seq) {
  return evaluate(property, seq.universe, seq.view());
}

}  // namespace kwidth
