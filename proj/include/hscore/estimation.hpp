#pragma once

// Minimum-score estimation of the Poisson mean theta, p(x) ∝ theta^x / x!,
// from a frequency table: theta minimises
//
//   sum_y f_y G_y(theta/(y+1)) + (f_{y+1} - f_y theta/(y+1)) G'_y(theta/(y+1)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "hscore/rule.hpp"

namespace hscore {

inline double poisson_empirical_score(double theta, const FrequencyTable& freq,
                                      const RuleParams& rule) {
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be non-negative");
  if (freq.empty()) throw std::invalid_argument("frequency table is empty");
  double total = 0.0;
  auto term = [&](std::uint64_t y) {
    const double fy = static_cast<double>(freq.count(y));
    const double fnext = static_cast<double>(freq.count(y + 1));
    const double v = theta / (static_cast<double>(y) + 1.0);
    double value = fy * g_value(y, v, rule);
    if (fnext > 0.0) value += fnext * g_deriv(y, v, rule);
    // v G'(v) -> 0 as v -> 0 for every m > 0.
    if (fy > 0.0 && v > 0.0) value -= fy * v * g_deriv(y, v, rule);
    return value;
  };
  std::uint64_t previous = 0;
  bool first = true;
  for (auto [value, count] : freq.counts()) {
    // y = value - 1 carries f_{y+1}; skip it when already visited as a support point.
    if (value > 0 && (first || previous != value - 1)) total += term(value - 1);
    total += term(value);
    previous = value;
    first = false;
  }
  return total;
}

struct LineMinimum {
  double x;
  double value;
  int iterations;
};

/// Golden-section search for a minimum of f on [lo, hi]. Stops when the
/// bracket is narrower than `tolerance`. The endpoints are compared with the
/// interior result so boundary minima are reported exactly.
inline LineMinimum golden_section_minimize(const std::function<double(double)>& f, double lo,
                                           double hi, double tolerance = 1e-8,
                                           int max_iterations = 500) {
  if (!(lo <= hi)) throw std::invalid_argument("empty search interval");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  int it = 0;
  while (b - a > tolerance && it < max_iterations) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  LineMinimum best{0.5 * (a + b), f(0.5 * (a + b)), it};
  for (double edge : {lo, hi}) {
    const double fe = f(edge);
    if (fe <= best.value) best = {edge, fe, it};
  }
  return best;
}

enum class FitMethod { ClosedForm, BracketSearch };

inline std::string to_string(FitMethod method) {
  return method == FitMethod::ClosedForm ? "closed-form" : "bracket-search";
}

struct FitResult {
  double theta_hat;
  double achieved_score;
  int iterations;
  FitMethod method;
};

struct FitOptions {
  /// Upper end of the search interval; max(10 * mean, 1) when unset.
  std::optional<double> theta_max;
  double tolerance = 1e-8;
};

/// Minimum-score estimate of theta. For a == m the minimiser is the sample
/// mean; otherwise a golden-section search over [0, theta_max].
inline FitResult fit_min_score(const FrequencyTable& freq, const RuleParams& rule,
                               const FitOptions& options = {}) {
  if (freq.empty()) throw std::invalid_argument("cannot fit an empty sample");
  auto objective = [&](double theta) { return poisson_empirical_score(theta, freq, rule); };

  if (rule.a() == rule.m()) {
    const double theta = freq.mean();
    return {theta, objective(theta), 0, FitMethod::ClosedForm};
  }

  const double theta_max = options.theta_max.value_or(std::max(10.0 * freq.mean(), 1.0));
  if (!(theta_max > 0.0)) throw std::invalid_argument("theta_max must be positive");
  const auto best = golden_section_minimize(objective, 0.0, theta_max, options.tolerance);
  return {best.x, objective(best.x), best.iterations, FitMethod::BracketSearch};
}

}  // namespace hscore
