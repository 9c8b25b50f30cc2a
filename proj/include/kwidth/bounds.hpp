#pragma once

// Leading-order lower bounds on transition widths, and a Monte Carlo replay
// of the tag-permutation coupling behind them.
//
// All bounds drop the (1 - o(1)) factors and are reported as leading order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "kwidth/bystander.hpp"
#include "kwidth/ensembles.hpp"
#include "kwidth/hypergeom.hpp"
#include "kwidth/parallel.hpp"
#include "kwidth/properties.hpp"
#include "kwidth/scaling.hpp"

namespace kwidth {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct BoundInputs {
  double p1 = 1;
  double p2 = 0;
  double eps = 0;    // probability that the bystander guarantee fails
  double gamma = 0;  // guaranteed bystander fraction
  double beta = 0;   // both m1/m and m2/m lie in [beta, 1 - beta]
  double m = 0;

  void validate() const {
    if (!(p1 >= 0 && p1 <= 1 && p2 >= 0 && p2 <= 1)) throw std::invalid_argument("p1, p2 must lie in [0, 1]");
    if (!(eps >= 0)) throw std::invalid_argument("eps must be nonnegative");
    if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("gamma must lie strictly between 0 and 1");
    if (!(beta > 0 && beta <= 0.5)) throw std::invalid_argument("beta must lie in (0, 1/2]");
    if (!(m > 0)) throw std::invalid_argument("m must be positive");
  }
};

// (|p1 - p2| - eps) sqrt(2 pi m) sqrt(gamma beta (1 - beta) / (1 - gamma)), floored at 0.
inline double theorem1_bound(const BoundInputs& in) {
  in.validate();
  const double gap = std::fabs(in.p1 - in.p2) - in.eps;
  if (gap <= 0) return 0.0;
  return gap * std::sqrt(kTwoPi * in.m) * std::sqrt(in.gamma * in.beta * (1 - in.beta) / (1 - in.gamma));
}

struct RatioBounds {
  double lower = 0;  // c_check
  double upper = 0;  // c_hat
};

// Bracket on the k-SAT critical ratio.
inline RatioBounds default_ratio_bounds(std::uint32_t k) {
  if (k < 2) throw std::invalid_argument("ratio bounds need k >= 2");
  if (k == 3) return {3.42, 4.571};
  const double ln2 = std::log(2.0);
  return {ln2 * std::ldexp(1.0, static_cast<int>(k) - 1) - (ln2 + 1) / 2, ln2 * std::ldexp(1.0, static_cast<int>(k))};
}

struct CorollaryInputs {
  std::uint32_t k = 3;
  double t = 0.3;
  double c_lower = 3.42;
  double c_upper = 4.571;
  double n = 1;

  static CorollaryInputs with_defaults(std::uint32_t k, double t, double n) {
    const RatioBounds r = default_ratio_bounds(k);
    return {k, t, r.lower, r.upper, n};
  }

  void validate() const {
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (!(t > 0)) throw std::invalid_argument("t must be positive");
    if (!(c_lower > 0)) throw std::invalid_argument("c_lower must be positive");
    if (!(c_lower <= c_upper)) throw std::invalid_argument("c_lower must not exceed c_upper");
    if (!(n > 0)) throw std::invalid_argument("n must be positive");
  }
};

// Bound divided by (p1 - p2) sqrt(n).
inline double corollary_constant(std::uint32_t k, double t, double c_lower, double c_upper) {
  CorollaryInputs{k, t, c_lower, c_upper, 1}.validate();
  const double busy = -std::expm1(-static_cast<double>(k) * (c_upper + t));  // 1 - e^{-k(c_hat + t)}
  const double busy_k = std::pow(busy, static_cast<double>(k));
  const double free_k = -std::expm1(static_cast<double>(k) * std::log(busy));  // 1 - busy^k
  return std::sqrt(kTwoPi) * std::sqrt(c_lower * t / (c_lower + t)) * std::sqrt(free_k / busy_k);
}

inline double corollary3_bound(const CorollaryInputs& in, double p1, double p2) {
  in.validate();
  return (p1 - p2) * std::sqrt(in.n) * corollary_constant(in.k, in.t, in.c_lower, in.c_upper);
}

struct TOptimum {
  double t = 0;
  double constant = 0;
};

// Golden-section maximisation of the constant over t > 0, after a log-spaced
// grid scan confirms a single interior peak.
inline TOptimum optimize_t(std::uint32_t k, double c_lower, double c_upper) {
  CorollaryInputs{k, 1, c_lower, c_upper, 1}.validate();
  auto f = [&](double log_t) { return corollary_constant(k, std::exp(log_t), c_lower, c_upper); };
  constexpr int kGrid = 400;
  const double lo = std::log(1e-6);
  const double hi = std::log(1e3);
  std::vector<double> values(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) values[i] = f(lo + (hi - lo) * i / kGrid);
  const auto best = std::max_element(values.begin(), values.end()) - values.begin();
  int turns = 0;
  for (int i = 1; i < kGrid; ++i) {
    const bool up_before = values[i] > values[i - 1];
    const bool up_after = values[i + 1] > values[i];
    if (up_before != up_after) ++turns;
  }
  if (turns > 1 || best == 0 || best == kGrid) {
    throw std::runtime_error("k-SAT width constant is not unimodal on the scanned range of t");
  }
  const double step = (hi - lo) / kGrid;
  double a = lo + step * static_cast<double>(best - 1);
  double b = lo + step * static_cast<double>(best + 1);
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  const double t = std::exp(0.5 * (a + b));
  return {t, corollary_constant(k, t, c_lower, c_upper)};
}

struct ConsistencyReport {
  double width = 0;
  double standard_error = 0;
  double bound = 0;
  double margin = 0;  // width + 3 stderr - bound
  bool ok = false;
};

inline ConsistencyReport consistency_check(const WidthEstimate& w, double bound) {
  ConsistencyReport r;
  r.width = w.width;
  r.standard_error = w.standard_error;
  r.bound = bound;
  r.margin = w.width + 3 * w.standard_error - bound;
  r.ok = r.margin >= 0;
  return r;
}

// Kept set for tag count b: with tags tau (a permutation of positions), the
// first L relevant items and the first b - L bystanders of f, where L counts
// relevant items among the first b tags.
inline std::vector<Item> kept_set(std::span<const Item> items, const std::vector<bool>& bystander,
                                  std::span<const std::uint32_t> tau, std::size_t b) {
  if (b > items.size() || tau.size() != items.size()) throw std::invalid_argument("kept_set: bad tag count");
  std::size_t relevant_tags = 0;
  for (std::size_t i = 0; i < b; ++i) relevant_tags += bystander[tau[i]] ? 0 : 1;
  std::vector<Item> kept;
  kept.reserve(b);
  std::size_t need_relevant = relevant_tags;
  std::size_t need_bystander = b - relevant_tags;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (bystander[i] ? need_bystander == 0 : need_relevant == 0) continue;
    kept.push_back(items[i]);
    (bystander[i] ? need_bystander : need_relevant) -= 1;
  }
  if (need_relevant != 0 || need_bystander != 0) throw std::logic_error("kept_set: tag counts exceed class sizes");
  return kept;
}

inline constexpr std::uint32_t kMaxTaggingVertices = 64;

struct TaggingRow {
  std::uint64_t b = 0;
  std::uint64_t trials = 0;
  double mean_diff = 0;  // Pr[proper at b] - Pr[proper at b-1]
  double se_diff = 0;
  double mean_bound = 0;  // E[max_l critical_pmf(r_m, g_m, b)]
  double se_bound = 0;
  bool within = false;  // |mean_diff| <= mean_bound + 3 se_diff
};

struct TaggingReport {
  std::vector<TaggingRow> rows;
  double mean_relevant = 0;
  double mean_critical_integers = 0;
};

// Replays the coupling for every b in [b_lo, b_hi].
inline TaggingReport tagging_experiment(const PropertyKind& property, const Universe& u, EnsembleMode mode,
                                        std::uint64_t m, std::uint64_t b_lo, std::uint64_t b_hi,
                                        std::uint64_t trials, std::uint64_t master_seed, unsigned threads = 0) {
  if (u.n() > kMaxTaggingVertices) throw std::invalid_argument("tagging_experiment: instance too large for exact evaluation");
  if (mode == EnsembleMode::Bernoulli) throw std::invalid_argument("tagging_experiment needs a fixed-size ensemble");
  if (!(b_lo >= 1 && b_lo <= b_hi && b_hi <= m)) throw std::invalid_argument("tagging_experiment needs 1 <= b_lo <= b_hi <= m");
  if (trials == 0) throw std::invalid_argument("tagging_experiment needs trials >= 1");
  if (!compatible(property, u)) throw std::invalid_argument("property does not apply to this universe");
  const EnsembleSpec ensemble{mode, m, 0.0};
  validate(u, ensemble);

  // max_l critical_pmf depends only on (r, b)
  std::vector<std::vector<double>> table(m + 1, std::vector<double>(b_hi + 1, 0.0));
  for (std::uint64_t r = 1; r <= m; ++r) {
    for (std::uint64_t b = b_lo; b <= b_hi; ++b) table[r][b] = max_critical_pmf(BallCounts{r, m - r, b}).value;
  }

  const std::size_t span = b_hi - b_lo + 1;
  std::vector<std::int8_t> diffs(trials * span);
  std::vector<double> bounds(trials * span);
  std::vector<std::uint32_t> relevant(trials);
  std::vector<std::uint32_t> critical(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const SeedSpec seed{master_seed, t};
    const ItemSequence f = sample(u, ensemble, seed);
    const std::vector<bool> bystander = partially_free_flags(u, f.view());
    std::vector<std::uint32_t> tau(m);
    std::iota(tau.begin(), tau.end(), 0U);
    SplitMix64 rng = seed.stream(2);
    shuffle(tau.begin(), tau.end(), rng);

    std::vector<Item> relevant_items;
    for (std::size_t i = 0; i < m; ++i) {
      if (!bystander[i]) relevant_items.push_back(f[i]);
    }
    const auto r = static_cast<std::uint32_t>(relevant_items.size());
    relevant[t] = r;
    std::uint32_t crit = 0;
    for (std::uint32_t l = 1; l <= r; ++l) {
      const std::span<const Item> all(relevant_items);
      crit += evaluate(property, u, all.first(l)) != evaluate(property, u, all.first(l - 1)) ? 1 : 0;
    }
    critical[t] = crit;

    bool previous = evaluate(property, u, kept_set(f.view(), bystander, tau, b_lo - 1));
    for (std::uint64_t b = b_lo; b <= b_hi; ++b) {
      const bool current = evaluate(property, u, kept_set(f.view(), bystander, tau, b));
      diffs[t * span + (b - b_lo)] = static_cast<std::int8_t>(static_cast<int>(current) - static_cast<int>(previous));
      bounds[t * span + (b - b_lo)] = table[r][b];
      previous = current;
    }
  });

  TaggingReport report;
  const auto count = static_cast<double>(trials);
  for (std::size_t j = 0; j < span; ++j) {
    double sum_d = 0, sum_d2 = 0, sum_b = 0, sum_b2 = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const double d = diffs[t * span + j];
      const double bnd = bounds[t * span + j];
      sum_d += d;
      sum_d2 += d * d;
      sum_b += bnd;
      sum_b2 += bnd * bnd;
    }
    TaggingRow row;
    row.b = b_lo + j;
    row.trials = trials;
    row.mean_diff = sum_d / count;
    row.mean_bound = sum_b / count;
    if (trials > 1) {
      row.se_diff = std::sqrt(std::max(0.0, (sum_d2 - count * row.mean_diff * row.mean_diff) / (count - 1)) / count);
      row.se_bound = std::sqrt(std::max(0.0, (sum_b2 - count * row.mean_bound * row.mean_bound) / (count - 1)) / count);
    }
    row.within = std::fabs(row.mean_diff) <= row.mean_bound + 3 * row.se_diff;
    report.rows.push_back(row);
  }
  report.mean_relevant = std::accumulate(relevant.begin(), relevant.end(), 0.0) / count;
  report.mean_critical_integers = std::accumulate(critical.begin(), critical.end(), 0.0) / count;
  return report;
}

}  // namespace kwidth
