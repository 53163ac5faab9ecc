#pragma once

// Key local scoring rule on the non-negative integers with nearest-neighbour
// neighbourhoods, from the concave family
//
//   G_y(v) = -(y+1)^a v^m / {m(m-1)},   m > 0, m != 1.
//
// The rule only ever consumes successive probability ratios
// r(x) = p(x+1)/p(x), so it is homogeneous: any unnormalized predictive
// weight function gives the same score as its normalized version.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hscore {

/// Member (a, m) of the scoring-rule family.
class RuleParams {
 public:
  constexpr RuleParams() = default;

  RuleParams(double a, double m) : a_(a), m_(m) {
    if (!std::isfinite(a)) {
      throw std::invalid_argument("rule parameter a must be finite");
    }
    if (!std::isfinite(m) || !(m > 0.0) || m == 1.0) {
      throw std::invalid_argument("rule parameter m must satisfy m > 0 and m != 1");
    }
  }

  constexpr double a() const noexcept { return a_; }
  constexpr double m() const noexcept { return m_; }

  friend constexpr bool operator==(const RuleParams&, const RuleParams&) = default;

 private:
  double a_ = 2.0;
  double m_ = 2.0;
};

/// Anything that maps x to r(x) = p(x+1)/p(x).
template <class R>
concept PredictiveRatio =
    std::invocable<const R&, std::uint64_t> &&
    std::convertible_to<std::invoke_result_t<const R&, std::uint64_t>, double>;

namespace detail {

// base^e with 0^e = 0 for e > 0. A zero base with a negative exponent has no
// finite value and is reported instead of returning inf.
inline double power(double base, double e) {
  if (base == 0.0) {
    if (e > 0.0) return 0.0;
    if (e == 0.0) return 1.0;
    throw std::domain_error("zero raised to a negative power");
  }
  return std::pow(base, e);
}

template <PredictiveRatio R>
double checked_ratio(const R& ratio, std::uint64_t x) {
  const double r = static_cast<double>(ratio(x));
  if (!std::isfinite(r) || r < 0.0) {
    throw std::domain_error("predictive ratio at x=" + std::to_string(x) +
                            " is negative or non-finite");
  }
  return r;
}

}  // namespace detail

/// G_y(v) = -(y+1)^a v^m / {m(m-1)}.
inline double g_value(std::uint64_t y, double v, const RuleParams& rule) {
  const double m = rule.m();
  return -std::pow(static_cast<double>(y) + 1.0, rule.a()) * detail::power(v, m) / (m * (m - 1.0));
}

/// dG_y/dv = -(y+1)^a v^{m-1} / (m-1). For m < 1 the value at v = 0 is +inf.
inline double g_deriv(std::uint64_t y, double v, const RuleParams& rule) {
  const double m = rule.m();
  return -std::pow(static_cast<double>(y) + 1.0, rule.a()) * std::pow(v, m - 1.0) / (m - 1.0);
}

/// Score of a single observation x under the predictive whose successive
/// ratios are given by `ratio`:
///
///   S(0)   = r(0)^m / m
///   S(x>0) = [(m-1)(x+1)^a r(x)^m - m x^a r(x-1)^{m-1}] / {m(m-1)}
///
/// Throws std::domain_error when a ratio is negative or non-finite, or when
/// r(x-1) = 0 for an observed x > 0.
template <PredictiveRatio R>
double score_point(std::uint64_t x, const R& ratio, const RuleParams& rule) {
  const double m = rule.m();
  const double a = rule.a();
  const double right = detail::checked_ratio(ratio, x);
  if (x == 0) {
    return detail::power(right, m) / m;
  }
  const double left = detail::checked_ratio(ratio, x - 1);
  if (left == 0.0) {
    throw std::domain_error("observation x=" + std::to_string(x) +
                            " has zero predictive mass relative to x-1");
  }
  const double xd = static_cast<double>(x);
  return ((m - 1.0) * std::pow(xd + 1.0, a) * detail::power(right, m) -
          m * std::pow(xd, a) * std::pow(left, m - 1.0)) /
         (m * (m - 1.0));
}

/// Sparse table of observation counts, iterated in ascending value order.
class FrequencyTable {
 public:
  FrequencyTable() = default;

  static FrequencyTable from_observations(std::span<const std::uint64_t> xs) {
    FrequencyTable table;
    for (auto x : xs) table.add(x);
    return table;
  }

  void add(std::uint64_t value, std::uint64_t count = 1) {
    if (count == 0) return;
    counts_[value] += count;
    n_ += count;
    t_ += value * count;
  }

  std::uint64_t count(std::uint64_t value) const {
    auto it = counts_.find(value);
    return it == counts_.end() ? 0 : it->second;
  }

  const std::map<std::uint64_t, std::uint64_t>& counts() const noexcept { return counts_; }
  std::uint64_t total_count() const noexcept { return n_; }
  std::uint64_t total_sum() const noexcept { return t_; }
  bool empty() const noexcept { return n_ == 0; }
  double mean() const noexcept {
    return n_ == 0 ? 0.0 : static_cast<double>(t_) / static_cast<double>(n_);
  }

  /// Observations in ascending order.
  std::vector<std::uint64_t> expand() const {
    std::vector<std::uint64_t> out;
    out.reserve(n_);
    for (auto [value, count] : counts_) out.insert(out.end(), count, value);
    return out;
  }

 private:
  std::map<std::uint64_t, std::uint64_t> counts_;
  std::uint64_t n_ = 0;
  std::uint64_t t_ = 0;
};

/// Total score of a sample summarised by its frequency table,
///
///   sum_y f_y G_y(v_y) + (f_{y+1} - f_y v_y) G'_y(v_y),   v_y = r(y).
///
/// Equal to the sum of score_point over the disaggregated sample.
template <PredictiveRatio R>
double empirical_total_score(const FrequencyTable& freq, const R& ratio, const RuleParams& rule) {
  if (freq.empty()) {
    throw std::invalid_argument("frequency table is empty");
  }
  // Every y with f_y > 0 or f_{y+1} > 0 contributes.
  std::vector<std::uint64_t> ys;
  ys.reserve(2 * freq.counts().size());
  for (auto [value, count] : freq.counts()) {
    if (value > 0) ys.push_back(value - 1);
    ys.push_back(value);
  }
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double total = 0.0;
  for (auto y : ys) {
    const double fy = static_cast<double>(freq.count(y));
    const double fnext = static_cast<double>(freq.count(y + 1));
    const double v = detail::checked_ratio(ratio, y);
    if (fnext > 0.0 && v == 0.0) {
      throw std::domain_error("observation x=" + std::to_string(y + 1) +
                              " has zero predictive mass relative to x-1");
    }
    double term = fy * g_value(y, v, rule);
    if (fnext > 0.0 || (fy > 0.0 && v > 0.0)) {
      const double gd = g_deriv(y, v, rule);
      if (fnext > 0.0) term += fnext * gd;
      if (fy > 0.0 && v > 0.0) term -= fy * v * gd;
    }
    total += term;
  }
  return total;
}

/// Predictive ratio built from an unnormalized weight function w(x) >= 0.
template <class W>
  requires std::invocable<const W&, std::uint64_t>
auto ratio_from_weights(W weights) {
  return [w = std::move(weights)](std::uint64_t x) -> double {
    return static_cast<double>(w(x + 1)) / static_cast<double>(w(x));
  };
}

}  // namespace hscore
