#pragma once

// Lookahead DPLL for satisfiability decisions on random k-CNF. At every node
// a shortlist of variables is probed in both polarities with unit
// propagation; failed probes force the opposite literal, and the branch
// variable maximises the product of clause reductions on both sides.
//
// Literal code 2v is x_v, 2v+1 is its negation.

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "kwidth/universe.hpp"

namespace kwidth {

class LookaheadSolver {
 public:
  LookaheadSolver(std::uint32_t n, std::span<const Item> clauses) : n_{n}, occurs_(2 * std::size_t{n}) {
    starts_.reserve(clauses.size() + 1);
    starts_.push_back(0);
    for (const Item& c : clauses) {
      for (std::size_t j = 0; j < c.arity(); ++j) {
        if (c.slot(j) >= n) throw std::out_of_range("clause variable out of range");
        lits_.push_back(2 * c.slot(j) + (c.negated(j) ? 1U : 0U));
      }
      starts_.push_back(static_cast<std::uint32_t>(lits_.size()));
    }
    const std::size_t count = clauses.size();
    sat_count_.assign(count, 0);
    free_count_.resize(count);
    value_.assign(n, kUnset);
    score_.assign(2 * std::size_t{n}, 0.0);
    implied_by_.assign(2 * std::size_t{n}, 0);
    unsatisfied_ = static_cast<std::uint32_t>(count);
    for (std::uint32_t c = 0; c < count; ++c) {
      free_count_[c] = starts_[c + 1] - starts_[c];
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) occurs_[lits_[i]].push_back(c);
      if (free_count_[c] == 0) conflict_ = true;
      if (free_count_[c] == 1) units_.push_back(c);
    }
  }

  bool solve() {
    nodes_ = 0;
    const bool sat = node();
    if (sat) {
      model_.assign(n_, 0);
      for (std::uint32_t v = 0; v < n_; ++v) model_[v] = static_cast<std::uint8_t>(value_[v] == 1);
    }
    return sat;
  }

  std::uint64_t nodes() const noexcept { return nodes_; }
  const std::vector<std::uint8_t>& model() const noexcept { return model_; }

 private:
  static constexpr std::int8_t kUnset = -1;

  void assign(std::uint32_t lit) {
    value_[lit >> 1] = static_cast<std::int8_t>((lit & 1U) ^ 1U);
    trail_.push_back(lit);
    for (std::uint32_t c : occurs_[lit]) {
      if (sat_count_[c]++ == 0) --unsatisfied_;
    }
    for (std::uint32_t c : occurs_[lit ^ 1U]) {
      const std::uint32_t left = --free_count_[c];
      if (sat_count_[c] == 0) {
        if (left == 0) {
          conflict_ = true;
        } else if (left == 1) {
          units_.push_back(c);
        } else {
          reduction_ += left == 2 ? 1.0 : 0.2;
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
        if (--sat_count_[c] == 0) ++unsatisfied_;
      }
      value_[lit >> 1] = kUnset;
    }
    units_.clear();
    conflict_ = false;
  }

  bool propagate() {
    while (!conflict_ && !units_.empty()) {
      const std::uint32_t c = units_.back();
      units_.pop_back();
      if (sat_count_[c] != 0) continue;
      std::uint32_t unit = 0;
      bool found = false;
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) {
        if (value_[lits_[i] >> 1] == kUnset) {
          unit = lits_[i];
          found = true;
          break;
        }
      }
      if (!found) {
        conflict_ = true;
        break;
      }
      assign(unit);
    }
    units_.clear();
    return !conflict_;
  }

  // Assigns lit and propagates; returns false on conflict. State is kept.
  bool try_literal(std::uint32_t lit) {
    assign(lit);
    return propagate();
  }

  // Cheap pre-score: occurrences in short clauses.
  void prescore() {
    std::fill(score_.begin(), score_.end(), 0.0);
    for (std::size_t c = 0; c < sat_count_.size(); ++c) {
      if (sat_count_[c] != 0) continue;
      const double w = free_count_[c] == 2 ? 5.0 : 1.0;
      for (std::uint32_t i = starts_[c]; i < starts_[c + 1]; ++i) {
        if (value_[lits_[i] >> 1] == kUnset) score_[lits_[i]] += w;
      }
    }
  }

  // 1 = branch chosen, 0 = conflict (node fails), 2 = satisfied by forced literals.
  int lookahead(std::uint32_t& branch) {
    for (;;) {
      prescore();
      candidates_.clear();
      for (std::uint32_t v = 0; v < n_; ++v) {
        if (value_[v] == kUnset && score_[2 * v] > 0 && score_[2 * v + 1] > 0) candidates_.push_back(v);
      }
      if (candidates_.empty()) {
        for (std::uint32_t v = 0; v < n_; ++v) {
          if (value_[v] == kUnset && (score_[2 * v] > 0 || score_[2 * v + 1] > 0)) candidates_.push_back(v);
        }
      }
      if (candidates_.empty()) return unsatisfied_ == 0 ? 2 : 0;
      auto pre = [&](std::uint32_t v) { return score_[2 * v] * score_[2 * v + 1] * 1024 + score_[2 * v] + score_[2 * v + 1]; };
      const std::size_t keep = std::max<std::size_t>(10, candidates_.size() / 10);
      if (candidates_.size() > keep) {
        std::nth_element(candidates_.begin(), candidates_.begin() + static_cast<std::ptrdiff_t>(keep), candidates_.end(),
                         [&](std::uint32_t a, std::uint32_t b) { return pre(a) > pre(b) || (pre(a) == pre(b) && a < b); });
        candidates_.resize(keep);
        std::sort(candidates_.begin(), candidates_.end());
      }
      bool forced = false;
      double best = -1;
      std::uint32_t best_lit = 0;
      for (std::uint32_t v : candidates_) {
        if (value_[v] != kUnset) continue;
        double red[2];
        bool ok[2];
        ++stamp_;
        necessary_.clear();
        for (std::uint32_t side = 0; side < 2; ++side) {
          const std::size_t mark = trail_.size();
          reduction_ = 0;
          ok[side] = try_literal(2 * v + side);
          red[side] = reduction_;
          for (std::size_t i = mark + 1; ok[side] && i < trail_.size(); ++i) {
            const std::uint32_t lit = trail_[i];
            if (side == 0) {
              implied_by_[lit] = stamp_;
            } else if (implied_by_[lit] == stamp_) {
              necessary_.push_back(lit);
            }
          }
          undo(mark);
        }
        if (!ok[0] && !ok[1]) return 0;
        if (!ok[0] || !ok[1]) {
          // failed literal: the other side is implied at this node
          if (!try_literal(ok[0] ? 2 * v : 2 * v + 1)) return 0;
          forced = true;
          continue;
        }
        if (!necessary_.empty()) {
          // implied by both polarities
          for (std::uint32_t lit : necessary_) {
            if (value_[lit >> 1] == kUnset && !try_literal(lit)) return 0;
          }
          forced = true;
        }
        const double s = red[0] * red[1] * 1024 + red[0] + red[1];
        if (s > best) {
          best = s;
          best_lit = red[0] >= red[1] ? 2 * v + 1 : 2 * v;  // less constrained side first
        }
      }
      if (unsatisfied_ == 0) return 2;
      if (!forced && best >= 0) {
        branch = best_lit;
        return 1;
      }
      if (!forced) return unsatisfied_ == 0 ? 2 : 0;
    }
  }

  bool node() {
    ++nodes_;
    const std::size_t mark = trail_.size();
    if (!propagate()) {
      undo(mark);
      return false;
    }
    if (unsatisfied_ == 0) return true;
    std::uint32_t lit = 0;
    const int state = lookahead(lit);
    if (state == 2) return true;
    if (state == 0) {
      undo(mark);
      return false;
    }
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
  std::vector<std::int8_t> value_;
  std::vector<std::uint32_t> trail_;
  std::vector<std::uint32_t> units_;
  std::vector<double> score_;
  std::vector<std::uint32_t> candidates_;
  std::vector<std::uint8_t> model_;
  std::vector<std::uint64_t> implied_by_;
  std::vector<std::uint32_t> necessary_;
  std::uint64_t stamp_ = 0;
  double reduction_ = 0;
  std::uint32_t unsatisfied_ = 0;
  bool conflict_ = false;
  std::uint64_t nodes_ = 0;
};

}  // namespace kwidth

namespace kwidth {

inline bool solve_lookahead(const Universe& u, std::span<const Item> formula) {
  if (u.kind() != ItemKind::Clause) throw std::invalid_argument("solve_lookahead needs clause items");
  return LookaheadSolver(u.n(), formula).solve();
}

// Smallest j in [1, limit] with items[0..j) unsatisfiable, or limit + 1.
// Bisection over prefix lengths; a model of a satisfiable prefix certifies
// every longer prefix it still satisfies without another solve.
inline std::uint64_t first_unsatisfiable_prefix(const Universe& u, std::span<const Item> items) {
  if (u.kind() != ItemKind::Clause) throw std::invalid_argument("first_unsatisfiable_prefix needs clause items");
  std::vector<std::uint8_t> model(u.n(), 0);
  auto satisfies = [&](const Item& c) {
    for (std::size_t j = 0; j < c.arity(); ++j) {
      if ((model[c.slot(j)] != 0) != c.negated(j)) return true;
    }
    return false;
  };
  const std::uint64_t limit = items.size();
  std::uint64_t lo = 0;          // items[0..lo) satisfied by model
  std::uint64_t hi = limit + 1;  // items[0..hi) known unsatisfiable, or limit + 1
  for (;;) {
    while (lo < limit && lo + 1 < hi && satisfies(items[lo])) ++lo;
    if (lo + 1 >= hi) return hi;
    const std::uint64_t probe = hi == limit + 1 ? limit : std::max(lo + 1, lo + (hi - lo) / 2);
    LookaheadSolver solver(u.n(), items.first(probe));
    if (solver.solve()) {
      model = solver.model();
      lo = 0;  // re-certify from the start with the new model
      while (lo < probe) {
        if (!satisfies(items[lo])) throw std::logic_error("lookahead model violates a clause");
        ++lo;
      }
    } else {
      hi = probe;
    }
  }
}

}  // namespace kwidth
