#pragma once

// Monte Carlo transition measurements at fixed n.
//
// Every trial t draws one sequence from stream (master_seed, trial_offset + t)
// and the formula at m is its length-m prefix. The same trials are reused at
// every m (common random numbers), and for monotone properties each trial
// flips state exactly once as m grows. The flip point of trial t is found by
// bisection over its own prefixes; the empirical curve
//
//     q(m) = #{trials whose flip point is > m} / T
//
// is then monotone and m_r, widths and their order-statistic error bars come
// directly from the sorted flip points.
//
// For decreasing properties (Sat, TwoSat, QColorable, SizeAtMost) q(m) is the
// fraction of proper sets. For QCore, which appears as m grows, q(m) is the
// fraction still without a q-core.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "kwidth/ensembles.hpp"
#include "kwidth/parallel.hpp"
#include "kwidth/properties.hpp"

namespace kwidth {

struct StudySpec {
  PropertyKind property = Sat{};
  ItemKind kind = ItemKind::Clause;
  std::uint32_t n = 0;
  std::uint32_t k = 3;
  EnsembleMode mode = EnsembleMode::WithoutReplacement;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_offset = 0;
  std::uint64_t m_max = 0;  // longest prefix examined; 0 picks default_m_max()
  double confidence = 0.95;
  unsigned threads = 0;  // 0 = default_threads()

  Universe universe() const { return Universe(kind, n, k); }
};

inline double z_score(double confidence) {
  if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("confidence level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2);
}

// Wilson score interval.
inline std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  if (trials == 0) return {0.0, 1.0};
  const double z = z_score(confidence);
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / t;
  const double z2 = z * z;
  const double center = (p + z2 / (2 * t)) / (1 + z2 / t);
  const double half = z * std::sqrt(p * (1 - p) / t + z2 / (4 * t * t)) / (1 + z2 / t);
  return {std::clamp(center - half, 0.0, p), std::clamp(center + half, p, 1.0)};
}

// Prefix length past which the property has almost surely flipped.
inline std::uint64_t default_m_max(const StudySpec& spec) {
  const double n = spec.n;
  double ratio = 0;
  struct {
    std::uint32_t k;
    double operator()(const Sat&) const { return std::ldexp(std::log(2.0), static_cast<int>(k)) * 1.1 + 3.0; }
    double operator()(const TwoSat&) const { return 3.0; }
    double operator()(const QCore& p) const { return p.q + 2.0; }
    double operator()(const QColorable& p) const { return p.q * std::log(p.q) + 3.0; }
    double operator()(const SolverCostInRange&) const { return 0.0; }
    double operator()(const SizeAtMost&) const { return 0.0; }
  } ratio_of{spec.k};
  ratio = std::visit(ratio_of, spec.property);
  std::uint64_t m_max = static_cast<std::uint64_t>(std::ceil(ratio * n));
  if (const auto* size = std::get_if<SizeAtMost>(&spec.property)) m_max = size->threshold + 1;
  if (std::holds_alternative<SolverCostInRange>(spec.property)) {
    throw std::invalid_argument("solver-cost windows are not monotone; use pcurve over a grid");
  }
  const BigCount total = spec.universe().size();
  if (spec.mode == EnsembleMode::WithoutReplacement && static_cast<BigCount>(m_max) > total) {
    m_max = static_cast<std::uint64_t>(total);
  }
  return m_max;
}

struct PCurvePoint {
  double m = 0;  // item count, or expected count p*M under Bernoulli
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double p_hat = 0;
  double ci_low = 0;
  double ci_high = 1;
};

struct PCurve {
  StudySpec spec;
  std::vector<PCurvePoint> points;
};

namespace detail {

inline void check_study(const StudySpec& spec) {
  const Universe u = spec.universe();
  if (!compatible(spec.property, u)) {
    throw std::invalid_argument("property " + to_string(spec.property) + " does not apply to this universe");
  }
}

inline PCurvePoint make_point(double m, std::uint64_t trials, std::uint64_t successes, double confidence) {
  const auto [lo, hi] = wilson_interval(successes, trials, confidence);
  return {m, trials, successes, static_cast<double>(successes) / static_cast<double>(trials), lo, hi};
}

}  // namespace detail

// Fraction of trials with the property at each grid value. Fixed-size modes
// take integer m; Bernoulli takes expected counts p*M.
inline PCurve pcurve(const StudySpec& spec, std::span<const double> grid, std::uint64_t trials) {
  detail::check_study(spec);
  if (trials == 0) throw std::invalid_argument("pcurve needs at least one trial");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("pcurve grid must be sorted");
  const Universe u = spec.universe();
  std::vector<std::vector<char>> outcome(trials, std::vector<char>(grid.size(), 0));
  if (spec.mode == EnsembleMode::Bernoulli) {
    const auto total = static_cast<double>(u.size64());
    for (double mu : grid) {
      if (mu < 0 || mu > total) throw std::invalid_argument("expected count outside [0, M]");
    }
    parallel_for(trials, spec.threads, [&](std::size_t t) {
      const SeedSpec seed{spec.master_seed, spec.trial_offset + t};
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double p = grid[g] / total;
        if (const auto* size = std::get_if<SizeAtMost>(&spec.property)) {
          outcome[t][g] = bernoulli_count(u, p, seed) <= size->threshold;
        } else {
          outcome[t][g] = evaluate(spec.property, sample(u, EnsembleSpec::bernoulli(p), seed));
        }
      }
    });
  } else {
    for (double m : grid) {
      if (m < 0 || m != std::floor(m)) throw std::invalid_argument("pcurve grid values must be integers for fnm");
    }
    const auto longest = static_cast<std::uint64_t>(grid.empty() ? 0.0 : grid.back());
    const EnsembleSpec ensemble{spec.mode, longest, 0.0};
    validate(u, ensemble);
    parallel_for(trials, spec.threads, [&](std::size_t t) {
      const ItemSequence seq = sample(u, ensemble, SeedSpec{spec.master_seed, spec.trial_offset + t});
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const auto m = static_cast<std::size_t>(grid[g]);
        outcome[t][g] = evaluate(spec.property, u, seq.view().first(m));
      }
    });
  }
  PCurve curve{spec, {}};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::uint64_t successes = 0;
    for (std::uint64_t t = 0; t < trials; ++t) successes += outcome[t][g] ? 1 : 0;
    curve.points.push_back(detail::make_point(grid[g], trials, successes, spec.confidence));
  }
  return curve;
}

struct ThresholdSample {
  std::vector<std::uint64_t> flips;  // per trial; m_max + 1 when never flipped
  std::uint64_t m_max = 0;
  std::uint64_t censored = 0;
  std::uint64_t monotonicity_violations = 0;
};

// Smallest prefix length at which trial `trial` leaves its m = 0 state,
// by bisection over nested prefixes. `spot_checks` random prefixes are
// re-evaluated afterwards to catch non-monotone behaviour.
inline std::uint64_t trial_flip_point(const StudySpec& spec, std::uint64_t m_max, std::uint64_t trial,
                                      unsigned spot_checks, std::uint64_t* violations) {
  const Universe u = spec.universe();
  const SeedSpec seed{spec.master_seed, spec.trial_offset + trial};
  const ItemSequence seq = sample(u, EnsembleSpec{spec.mode, m_max, 0.0}, seed);
  const std::span<const Item> items = seq.view();
  auto flipped = [&, initial = evaluate(spec.property, u, items.first(0))](std::uint64_t m) {
    return evaluate(spec.property, u, items.first(m)) != initial;
  };
  std::uint64_t flip = m_max + 1;
  if (std::holds_alternative<Sat>(spec.property)) {
    flip = first_unsatisfiable_prefix(u, items);
  } else if (m_max > 0 && flipped(m_max)) {
    std::uint64_t lo = 0;  // not flipped
    std::uint64_t hi = m_max;  // flipped
    while (hi - lo > 1) {
      const std::uint64_t mid = lo + (hi - lo) / 2;
      if (flipped(mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    flip = hi;
  }
  if (spot_checks > 0 && m_max > 1) {
    SplitMix64 rng = seed.stream(1);
    for (unsigned i = 0; i < spot_checks; ++i) {
      const std::uint64_t m = 1 + rng.below(m_max);
      if (flipped(m) != (m >= flip)) ++*violations;
    }
  }
  return flip;
}

inline void extend_thresholds(const StudySpec& spec, ThresholdSample& sample_out, std::uint64_t more,
                              unsigned spot_checks) {
  if (monotonicity(spec.property) == Monotonicity::None) {
    throw std::invalid_argument("threshold estimation needs a monotone property");
  }
  detail::check_study(spec);
  if (spec.mode == EnsembleMode::Bernoulli) throw std::invalid_argument("flip points need a fixed-size ensemble");
  if (sample_out.m_max == 0) sample_out.m_max = spec.m_max != 0 ? spec.m_max : default_m_max(spec);
  const std::size_t first = sample_out.flips.size();
  sample_out.flips.resize(first + more);
  std::vector<std::uint64_t> violations(more, 0);
  parallel_for(more, spec.threads, [&](std::size_t i) {
    sample_out.flips[first + i] = trial_flip_point(spec, sample_out.m_max, first + i, spot_checks, &violations[i]);
  });
  for (std::size_t i = 0; i < more; ++i) {
    sample_out.monotonicity_violations += violations[i];
    if (sample_out.flips[first + i] > sample_out.m_max) ++sample_out.censored;
  }
}

struct QuantileEstimate {
  std::uint64_t value = 0;
  double stderr_ = 0;
  double half_width = 0;
  bool censored = false;  // estimate relies on trials that never flipped
};

namespace detail {

// Distribution-free order-statistic interval around sorted[rank - 1].
inline std::pair<double, double> order_statistic_interval(std::span<const std::uint64_t> sorted, double rank,
                                                          double z) {
  const double t = static_cast<double>(sorted.size());
  const double q = std::clamp(rank / t, 0.0, 1.0);
  const double spread = z * std::sqrt(t * q * (1 - q));
  auto at = [&](double r) {
    const auto idx = static_cast<std::size_t>(std::clamp(r, 1.0, t)) - 1;
    return static_cast<double>(sorted[idx]);
  };
  return {at(std::floor(rank - spread)), at(std::ceil(rank + spread))};
}

}  // namespace detail

// Smallest m with q(m) <= r.
inline QuantileEstimate m_r_from_flips(std::span<const std::uint64_t> sorted, std::uint64_t m_max, double r, double z) {
  const std::uint64_t total = sorted.size();
  const auto allowed = static_cast<std::uint64_t>(std::floor(r * static_cast<double>(total) + 1e-9));
  QuantileEstimate est;
  if (allowed >= total) return est;  // q(0) <= r already
  const std::uint64_t rank = total - allowed;  // 1-based
  est.value = sorted[rank - 1];
  est.censored = est.value > m_max;
  const auto [lo, hi] = detail::order_statistic_interval(sorted, static_cast<double>(rank), z);
  est.half_width = (hi - lo) / 2;
  est.stderr_ = est.half_width / z;
  return est;
}

// Largest m with q(m) >= level.
inline QuantileEstimate m_above_from_flips(std::span<const std::uint64_t> sorted, std::uint64_t m_max, double level,
                                           double z) {
  const std::uint64_t total = sorted.size();
  const auto need = static_cast<std::uint64_t>(std::ceil(level * static_cast<double>(total) - 1e-9));
  QuantileEstimate est;
  if (need == 0) {
    est.value = m_max;
    est.censored = true;
    return est;
  }
  const std::uint64_t rank = total - need + 1;  // 1-based; flips >= 1 so value >= 0
  est.value = sorted[rank - 1] - 1;
  est.censored = sorted[rank - 1] > m_max;
  const auto [lo, hi] = detail::order_statistic_interval(sorted, static_cast<double>(rank), z);
  est.half_width = (hi - lo) / 2;
  est.stderr_ = est.half_width / z;
  return est;
}

struct MrEstimate {
  double r = 0;
  std::uint64_t m_r = 0;
  double stderr_ = 0;
  std::uint64_t trials = 0;
  std::uint64_t censored_trials = 0;
  std::uint64_t monotonicity_violations = 0;
};

// Adds `batch` trials at a time until the interval half-width is at most
// `tolerance` or `max_trials` is reached.
inline MrEstimate estimate_m_r(const StudySpec& spec, double r, std::uint64_t batch, double tolerance,
                               std::uint64_t max_trials, unsigned spot_checks = 1) {
  if (!(r > 0 && r < 1)) throw std::invalid_argument("r must lie in (0, 1)");
  if (batch == 0) throw std::invalid_argument("batch must be positive");
  const double z = z_score(spec.confidence);
  ThresholdSample flips;
  QuantileEstimate q;
  for (;;) {
    extend_thresholds(spec, flips, std::min(batch, std::max(batch, max_trials) - flips.flips.size()), spot_checks);
    std::vector<std::uint64_t> sorted = flips.flips;
    std::sort(sorted.begin(), sorted.end());
    q = m_r_from_flips(sorted, flips.m_max, r, z);
    if (q.half_width <= tolerance || flips.flips.size() >= max_trials) break;
  }
  if (q.censored) {
    throw std::runtime_error("m_r lies beyond the examined prefix length " + std::to_string(flips.m_max) +
                             "; raise m_max");
  }
  return {r, q.value, q.stderr_, flips.flips.size(), flips.censored, flips.monotonicity_violations};
}

struct WidthEstimate {
  std::uint32_t n = 0;
  double epsilon = 1.0 / 3.0;
  double m_high_sat = 0;  // last m with q(m) >= 1 - eps
  double m_low_sat = 0;   // first m with q(m) <= eps
  double width = 0;
  double standard_error = 0;
  std::uint64_t trials = 0;
  std::uint64_t monotonicity_violations = 0;
};

// Width = (first m with q <= eps) - (last m with q >= 1 - eps). A
// deterministic step has width 1.
inline WidthEstimate width_from_flips(const ThresholdSample& flips, std::uint32_t n, double eps, double z) {
  std::vector<std::uint64_t> sorted = flips.flips;
  std::sort(sorted.begin(), sorted.end());
  const QuantileEstimate hi = m_r_from_flips(sorted, flips.m_max, eps, z);
  const QuantileEstimate lo = m_above_from_flips(sorted, flips.m_max, 1 - eps, z);
  if (hi.censored || lo.censored) {
    throw std::runtime_error("transition extends beyond the examined prefix length " + std::to_string(flips.m_max) +
                             "; raise m_max");
  }
  WidthEstimate w;
  w.n = n;
  w.epsilon = eps;
  w.m_high_sat = static_cast<double>(lo.value);
  w.m_low_sat = static_cast<double>(hi.value);
  w.width = w.m_low_sat - w.m_high_sat;
  w.standard_error = std::hypot(hi.stderr_, lo.stderr_);
  w.trials = sorted.size();
  w.monotonicity_violations = flips.monotonicity_violations;
  return w;
}

inline WidthEstimate width(const StudySpec& spec, double eps, std::uint64_t batch, double tolerance,
                           std::uint64_t max_trials, unsigned spot_checks = 1) {
  if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  if (batch == 0) throw std::invalid_argument("batch must be positive");
  const double z = z_score(spec.confidence);
  ThresholdSample flips;
  for (;;) {
    extend_thresholds(spec, flips, std::min(batch, std::max(batch, max_trials) - flips.flips.size()), spot_checks);
    std::vector<std::uint64_t> sorted = flips.flips;
    std::sort(sorted.begin(), sorted.end());
    const auto hi = m_r_from_flips(sorted, flips.m_max, eps, z);
    const auto lo = m_above_from_flips(sorted, flips.m_max, 1 - eps, z);
    if (std::max(hi.half_width, lo.half_width) <= tolerance || flips.flips.size() >= max_trials) break;
  }
  return width_from_flips(flips, spec.n, eps, z);
}

// Bernoulli ensemble: bisection over the expected count mu = p*M with common
// random numbers across probes. Returns the width in expected-count units.
inline WidthEstimate width_bernoulli(const StudySpec& spec, double eps, std::uint64_t trials, double mu_max,
                                     double tolerance) {
  if (!(eps > 0 && eps < 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2)");
  if (spec.mode != EnsembleMode::Bernoulli) throw std::invalid_argument("width_bernoulli needs the fnp ensemble");
  if (monotonicity(spec.property) == Monotonicity::None) throw std::invalid_argument("needs a monotone property");
  detail::check_study(spec);
  const bool increasing = monotonicity(spec.property) == Monotonicity::Increasing;
  auto q_at = [&](double mu) {
    const double grid[] = {mu};
    const PCurve c = pcurve(spec, grid, trials);
    return increasing ? 1 - c.points[0].p_hat : c.points[0].p_hat;
  };
  // smallest mu with q(mu) <= level (pred true) on [0, mu_max]
  auto first_at_most = [&](double level) {
    double lo = 0;
    double hi = mu_max;
    if (q_at(hi) > level) throw std::runtime_error("transition extends beyond mu_max");
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (q_at(mid) <= level ? hi : lo) = mid;
    }
    return hi;
  };
  // largest mu with q(mu) >= level
  auto last_at_least = [&](double level) {
    double lo = 0;
    double hi = mu_max;
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      (q_at(mid) >= level ? lo : hi) = mid;
    }
    return lo;
  };
  WidthEstimate w;
  w.n = spec.n;
  w.epsilon = eps;
  w.m_low_sat = first_at_most(eps);
  w.m_high_sat = last_at_least(1 - eps);
  w.width = w.m_low_sat - w.m_high_sat;
  w.trials = trials;
  // delta method with the secant slope across the transition
  const double slope = (1 - 2 * eps) / std::max(w.width, tolerance);
  const double se_level = std::sqrt(eps * (1 - eps) / static_cast<double>(trials));
  w.standard_error = std::sqrt(2.0) * se_level / slope;
  return w;
}

struct WidthPoint {
  double n = 0;
  double width = 0;
  double stderr_ = 0;
};

struct ScalingFit {
  double nu_hat = 0;
  double amplitude = 0;  // C in width = C n^{1 - 1/nu}
  double slope = 0;      // 1 - 1/nu
  double stderr_slope = 0;
  double stderr_nu = 0;
  std::vector<double> residuals;  // log-width residuals
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (log C, slope)
};

// Weighted least squares of log(width) on log(n). Weights are
// (width / stderr)^2 when every point has a positive stderr, uniform
// otherwise. Covariance is scaled by the residual variance.
inline ScalingFit fit_nu(std::span<const WidthPoint> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_nu needs at least 3 points");
  std::vector<double> ns;
  bool weighted = true;
  for (const auto& p : points) {
    if (!(p.width > 0) || !(p.n > 0)) throw std::invalid_argument("fit_nu needs positive n and width");
    ns.push_back(p.n);
    weighted = weighted && p.stderr_ > 0;
  }
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < 3) throw std::invalid_argument("fit_nu needs 3 distinct n");
  const auto count = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd x(count, 2);
  Eigen::VectorXd y(count);
  Eigen::VectorXd w(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const auto& p = points[static_cast<std::size_t>(i)];
    x(i, 0) = 1.0;
    x(i, 1) = std::log(p.n);
    y(i) = std::log(p.width);
    w(i) = weighted ? (p.width / p.stderr_) * (p.width / p.stderr_) : 1.0;
  }
  const Eigen::Matrix2d normal = x.transpose() * w.asDiagonal() * x;
  const Eigen::Vector2d beta = normal.ldlt().solve(x.transpose() * w.asDiagonal() * y);
  ScalingFit fit;
  const Eigen::VectorXd resid = y - x * beta;
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  const double dof = static_cast<double>(count - 2);
  const double scale = resid.dot(w.asDiagonal() * resid) / dof;
  fit.covariance = normal.inverse() * scale;
  fit.slope = beta(1);
  fit.amplitude = std::exp(beta(0));
  fit.stderr_slope = std::sqrt(std::max(0.0, fit.covariance(1, 1)));
  if (!(fit.slope > 0) || !(fit.slope < 1)) {
    throw std::domain_error("fitted slope " + std::to_string(fit.slope) + " outside (0, 1); nu undefined");
  }
  fit.nu_hat = 1 / (1 - fit.slope);
  fit.stderr_nu = fit.stderr_slope / ((1 - fit.slope) * (1 - fit.slope));
  return fit;
}

struct ThresholdPoint {
  double n = 0;
  double m_half = 0;
};

struct ThresholdFit {
  double alpha = 0;
  double amplitude = 0;
  double nu = 0;
  double exponent = 0;  // 1 - 1/nu
  double rss = 0;
  double condition_number = 0;
  bool nu_identified = true;  // false when the correction term vanishes
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // (alpha, A, nu)
};

// Least squares for m_half(n) = alpha n + A n^{1 - 1/nu}. For fixed exponent
// the model is linear, so the exponent is found by a scan plus golden-section
// refinement and (alpha, A) by linear least squares at each candidate. This
// fit is badly conditioned in practice; inspect condition_number.
inline ThresholdFit threshold_fit(std::span<const ThresholdPoint> points) {
  if (points.size() < 4) throw std::invalid_argument("threshold_fit needs at least 4 points");
  std::vector<double> ns;
  for (const auto& p : points) {
    if (!(p.n > 0)) throw std::invalid_argument("threshold_fit needs positive n");
    ns.push_back(p.n);
  }
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < 3) {
    throw std::domain_error("threshold_fit: fewer than 3 distinct n, design matrix is rank deficient");
  }
  const auto count = static_cast<Eigen::Index>(points.size());
  Eigen::VectorXd y(count);
  for (Eigen::Index i = 0; i < count; ++i) y(i) = points[static_cast<std::size_t>(i)].m_half;

  struct Linear {
    Eigen::Vector2d coef;
    double rss;
  };
  auto solve_linear = [&](double s) {
    Eigen::MatrixXd x(count, 2);
    for (Eigen::Index i = 0; i < count; ++i) {
      const double n = points[static_cast<std::size_t>(i)].n;
      x(i, 0) = n;
      x(i, 1) = std::pow(n, s);
    }
    Linear out;
    out.coef = x.colPivHouseholderQr().solve(y);
    out.rss = (y - x * out.coef).squaredNorm();
    return out;
  };

  // A = 0 collapses the model to a line through the origin.
  {
    Eigen::VectorXd x(count);
    for (Eigen::Index i = 0; i < count; ++i) x(i) = points[static_cast<std::size_t>(i)].n;
    const double alpha = x.dot(y) / x.dot(x);
    const double rss = (y - alpha * x).squaredNorm();
    if (rss <= 1e-20 * y.squaredNorm()) {
      ThresholdFit fit;
      fit.alpha = alpha;
      fit.nu_identified = false;
      fit.nu = std::numeric_limits<double>::quiet_NaN();
      fit.exponent = std::numeric_limits<double>::quiet_NaN();
      fit.rss = rss;
      return fit;
    }
  }

  constexpr double kLowest = -4.0;  // nu = 0.2
  constexpr double kHighest = 0.999;  // nu = 1000
  constexpr int kGrid = 2000;
  double best_s = kLowest;
  double best_rss = std::numeric_limits<double>::infinity();
  int best_i = 0;
  for (int i = 0; i <= kGrid; ++i) {
    const double s = kLowest + (kHighest - kLowest) * i / kGrid;
    const double rss = solve_linear(s).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_s = s;
      best_i = i;
    }
  }
  if (best_i == 0 || best_i == kGrid) {
    throw std::runtime_error("threshold_fit did not converge: best exponent " + std::to_string(best_s) +
                             " sits on the search boundary (rss " + std::to_string(best_rss) + ")");
  }
  const double step = (kHighest - kLowest) / kGrid;
  double a = best_s - step;
  double b = best_s + step;
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - phi * (b - a);
  double d = a + phi * (b - a);
  double fc = solve_linear(c).rss;
  double fd = solve_linear(d).rss;
  for (int iter = 0; iter < 200 && (b - a) > 1e-13; ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = solve_linear(c).rss;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = solve_linear(d).rss;
    }
  }
  const double s = 0.5 * (a + b);
  const Linear lin = solve_linear(s);
  ThresholdFit fit;
  fit.exponent = s;
  fit.nu = 1 / (1 - s);
  fit.alpha = lin.coef(0);
  fit.amplitude = lin.coef(1);
  fit.rss = lin.rss;

  Eigen::MatrixXd jac(count, 3);
  for (Eigen::Index i = 0; i < count; ++i) {
    const double n = points[static_cast<std::size_t>(i)].n;
    const double ns_ = std::pow(n, s);
    jac(i, 0) = n;
    jac(i, 1) = ns_;
    jac(i, 2) = fit.amplitude * ns_ * std::log(n) / (fit.nu * fit.nu);  // d/dnu via ds/dnu = 1/nu^2
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& sv = svd.singularValues();
  fit.condition_number = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  fit.nu_identified = std::isfinite(fit.condition_number) && fit.condition_number < 1e14;
  if (count > 3 && fit.nu_identified) {
    const Eigen::Matrix3d jtj = jac.transpose() * jac;
    fit.covariance = jtj.inverse() * (fit.rss / static_cast<double>(count - 3));
  }
  return fit;
}

}  // namespace kwidth
