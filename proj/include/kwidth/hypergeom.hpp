#pragma once

// Red/green ball sampling kernel: the probability that, drawing b of r+g
// balls without replacement, the b-th ball is red and exactly l of the b
// drawn balls are red,
//
//     C(r, l) C(g, b - l) (l / b) / C(r + g, b).
//
// Exact big-rational arithmetic up to kExactLimit balls, log-gamma with
// compensated summation above.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace kwidth {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Crossover from exact rationals to log-gamma evaluation.
inline constexpr std::uint64_t kExactLimit = 2000;

struct BallCounts {
  std::uint64_t red = 0;
  std::uint64_t green = 0;
  std::uint64_t sample = 0;

  std::uint64_t total() const noexcept { return red + green; }
  Rational gamma() const { return Rational(green, total()); }
  Rational beta() const { return Rational(sample, total()); }

  void validate() const {
    if (sample > total()) throw std::invalid_argument("sample size exceeds ball count");
  }
};

struct Support {
  std::uint64_t lo = 1;
  std::uint64_t hi = 0;
  bool empty() const noexcept { return lo > hi; }
  bool contains(std::uint64_t ell) const noexcept { return lo <= ell && ell <= hi; }
};

// Values of l with nonzero probability: max(1, b - g) <= l <= min(r, b).
inline Support critical_support(const BallCounts& c) {
  c.validate();
  if (c.sample == 0) return {1, 0};
  const std::uint64_t lo = std::max<std::uint64_t>(1, c.sample > c.green ? c.sample - c.green : 0);
  const std::uint64_t hi = std::min(c.red, c.sample);
  return {lo, hi};
}

inline BigInt big_binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt result = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    result *= n - i;
    result /= i + 1;
  }
  return result;
}

inline Rational critical_pmf_exact(const BallCounts& c, std::uint64_t ell) {
  c.validate();
  if (c.sample == 0) throw std::invalid_argument("critical_pmf needs b >= 1");
  if (!critical_support(c).contains(ell)) return Rational(0);
  BigInt numerator = big_binomial(c.red, ell) * big_binomial(c.green, c.sample - ell) * ell;
  BigInt denominator = big_binomial(c.total(), c.sample) * c.sample;
  return Rational(numerator, denominator);
}

namespace detail {

// Neumaier-compensated sum.
class CompensatedSum {
 public:
  void add(long double x) {
    const long double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + carry_; }

 private:
  long double sum_ = 0;
  long double carry_ = 0;
};

inline long double log_binomial(std::uint64_t n, std::uint64_t k) {
  return std::lgamma(static_cast<long double>(n) + 1) - std::lgamma(static_cast<long double>(k) + 1) -
         std::lgamma(static_cast<long double>(n - k) + 1);
}

inline long double log_critical_pmf(const BallCounts& c, std::uint64_t ell) {
  CompensatedSum s;
  s.add(std::lgamma(static_cast<long double>(c.red) + 1));
  s.add(-std::lgamma(static_cast<long double>(ell) + 1));
  s.add(-std::lgamma(static_cast<long double>(c.red - ell) + 1));
  s.add(std::lgamma(static_cast<long double>(c.green) + 1));
  s.add(-std::lgamma(static_cast<long double>(c.sample - ell) + 1));
  s.add(-std::lgamma(static_cast<long double>(c.green - (c.sample - ell)) + 1));
  s.add(std::log(static_cast<long double>(ell)));
  s.add(-std::log(static_cast<long double>(c.sample)));
  s.add(-log_binomial(c.total(), c.sample));
  return s.value();
}

}  // namespace detail

inline double critical_pmf(const BallCounts& c, std::uint64_t ell) {
  c.validate();
  if (c.sample == 0) throw std::invalid_argument("critical_pmf needs b >= 1");
  if (!critical_support(c).contains(ell)) return 0.0;
  if (c.total() <= kExactLimit) return critical_pmf_exact(c, ell).convert_to<double>();
  return static_cast<double>(std::exp(detail::log_critical_pmf(c, ell)));
}

// pmf(l) / pmf(l + 1) = l (g - b + l + 1) / ((r - l)(b - l)). Monotone
// nondecreasing in l, which certifies unimodality.
inline Rational successive_ratio(const BallCounts& c, std::uint64_t ell) {
  const Support s = critical_support(c);
  if (!s.contains(ell) || !s.contains(ell + 1)) {
    throw std::domain_error("successive_ratio undefined at l=" + std::to_string(ell) + ": pmf vanishes");
  }
  const BigInt num = BigInt(ell) * (BigInt(c.green) + ell + 1 - c.sample);
  const BigInt den = (BigInt(c.red) - ell) * (BigInt(c.sample) - ell);
  return Rational(num, den);
}

// ceil(r b / (r + g + 1)) clamped to the support. When pmf(l) = pmf(l + 1)
// at the top this is the smaller of the two maximisers.
inline std::uint64_t mode(const BallCounts& c) {
  if (c.sample == 0 || c.red == 0) throw std::invalid_argument("mode needs b >= 1 and r >= 1");
  const Support s = critical_support(c);
  if (s.empty()) throw std::domain_error("mode: empty support");
  const unsigned __int128 num = static_cast<unsigned __int128>(c.red) * c.sample;
  const unsigned __int128 den = c.total() + 1;
  const auto ceil_value = static_cast<std::uint64_t>((num + den - 1) / den);
  return std::clamp(ceil_value, s.lo, s.hi);
}

struct PmfMax {
  std::uint64_t ell = 0;
  double value = 0.0;
};

// max over l of the pmf by scanning the whole support (smallest argmax on
// ties). Exact integer comparison below kExactLimit.
inline PmfMax max_critical_pmf(const BallCounts& c) {
  c.validate();
  if (c.sample == 0) throw std::invalid_argument("max_critical_pmf needs b >= 1");
  const Support s = critical_support(c);
  if (s.empty()) return {0, 0.0};
  if (c.total() <= kExactLimit) {
    // Numerators C(r,l) C(g,b-l) l share the denominator b C(m,b).
    BigInt red_choose = big_binomial(c.red, s.lo);
    BigInt green_choose = big_binomial(c.green, c.sample - s.lo);
    BigInt best = red_choose * green_choose * s.lo;
    std::uint64_t best_ell = s.lo;
    for (std::uint64_t ell = s.lo + 1; ell <= s.hi; ++ell) {
      red_choose *= c.red - (ell - 1);
      red_choose /= ell;
      green_choose *= c.sample - (ell - 1);
      green_choose /= c.green - c.sample + ell;
      BigInt candidate = red_choose * green_choose * ell;
      if (candidate > best) {
        best = std::move(candidate);
        best_ell = ell;
      }
    }
    const Rational value(best, big_binomial(c.total(), c.sample) * c.sample);
    return {best_ell, value.convert_to<double>()};
  }
  long double best = -INFINITY;
  std::uint64_t best_ell = s.lo;
  for (std::uint64_t ell = s.lo; ell <= s.hi; ++ell) {
    const long double v = detail::log_critical_pmf(c, ell);
    if (v > best) {
      best = v;
      best_ell = ell;
    }
  }
  return {best_ell, static_cast<double>(std::exp(best))};
}

// Leading-order bound (2 pi m)^{-1/2} sqrt((1 - gamma) / (gamma beta (1 - beta))).
inline double max_bound(double m, double gamma, double beta) {
  if (!(m >= 1)) throw std::invalid_argument("max_bound needs m >= 1");
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("max_bound needs 0 < gamma < 1");
  if (!(beta > 0 && beta < 1)) throw std::invalid_argument("max_bound needs 0 < beta < 1");
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt((1 - gamma) / (gamma * beta * (1 - beta)) / (kTwoPi * m));
}

// gamma = g/m and beta = b/m taken as exact ratios.
inline double max_bound(const BallCounts& c) {
  c.validate();
  const auto m = static_cast<double>(c.total());
  return max_bound(m, static_cast<double>(c.green) / m, static_cast<double>(c.sample) / m);
}

}  // namespace kwidth
