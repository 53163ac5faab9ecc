#pragma once

// Conjugate predictive machinery for two count models:
//
//   Poisson(k * lambda)        with lambda ~ Gamma(alpha, beta)
//   NegBin(s; theta)           with theta  ~ Beta(p, q)
//
// Each model provides its predictive ratio, the closed-form scores for a
// single observation, for the sufficient statistic t_N and for prequential
// increments, plus the usual improper limits (all hyperparameters -> 0).
// Jeffreys priors are handled by substituting their hyperparameters into the
// proper-prior expressions.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "hscore/rule.hpp"

namespace hscore {

enum class PriorKind { Proper, UsualImproper, Jeffreys };

/// Conjugate prior hyperparameters. hyper1 is alpha (Gamma) or p (Beta),
/// hyper2 is beta (Gamma) or q (Beta).
struct PriorSpec {
  PriorKind kind = PriorKind::UsualImproper;
  double hyper1 = 0.0;
  double hyper2 = 0.0;

  static PriorSpec proper(double h1, double h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0) || !std::isfinite(h1) || !std::isfinite(h2)) {
      throw std::invalid_argument("proper prior requires positive finite hyperparameters");
    }
    return {PriorKind::Proper, h1, h2};
  }
  static constexpr PriorSpec usual_improper() { return {PriorKind::UsualImproper, 0.0, 0.0}; }
  /// Hyperparameters are resolved per model: (1/2, 0) for Poisson-Gamma,
  /// (0, 1/2) for NegBin-Beta.
  static constexpr PriorSpec jeffreys() { return {PriorKind::Jeffreys, 0.0, 0.0}; }

  friend constexpr bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

inline std::string to_string(PriorKind kind) {
  switch (kind) {
    case PriorKind::Proper:
      return "proper";
    case PriorKind::UsualImproper:
      return "improper";
    case PriorKind::Jeffreys:
      return "jeffreys";
  }
  return "unknown";
}

/// Result of consuming one observation: its score and the updated state.
template <class State>
struct ModelStep {
  double increment;
  State next;
};

namespace closed_form {

using detail::power;

// ---- Poisson-Gamma -------------------------------------------------------

/// Single observation x under the predictive with shape alpha and
/// phi = k/(beta+k).
inline double poisson_single(std::uint64_t x, double alpha, double phi, const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  if (x == 0) return power(alpha, m) * power(phi, m) / m;
  const double xd = static_cast<double>(x);
  return ((m - 1.0) * power(phi, m) * std::pow(xd + 1.0, a - m) * power(xd + alpha, m) -
          m * power(phi, m - 1.0) * std::pow(xd, a - m + 1.0) * power(xd + alpha - 1.0, m - 1.0)) /
         (m * (m - 1.0));
}

/// Sufficient statistic t_N of N observations: k -> Nk.
inline double poisson_suff(std::uint64_t t_total, std::uint64_t count, double k, double alpha,
                           double beta, const RuleParams& rule) {
  const double nk = static_cast<double>(count) * k;
  return poisson_single(t_total, alpha, nk / (beta + nk), rule);
}

/// Sufficient-statistic score under alpha, beta -> 0.
inline double poisson_suff_improper(std::uint64_t t_total, const RuleParams& rule) {
  if (t_total == 0) return 0.0;
  const double a = rule.a(), m = rule.m();
  const double t = static_cast<double>(t_total);
  return ((m - 1.0) * std::pow(t + 1.0, a - m) * std::pow(t, m) -
          m * std::pow(t, a - m + 1.0) * power(t - 1.0, m - 1.0)) /
         (m * (m - 1.0));
}

/// Prequential increment for observation x at step `step` (1-based) after a
/// history summing to t_prev.
inline double poisson_preq(std::uint64_t x, std::uint64_t t_prev, std::uint64_t step, double k,
                           double alpha, double beta, const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  const double phi = k / (beta + static_cast<double>(step) * k);
  if (x == 0) return power(phi, m) * power(alpha + static_cast<double>(t_prev), m) / m;
  const double xd = static_cast<double>(x);
  const double tn = static_cast<double>(t_prev + x);
  return ((m - 1.0) * power(phi, m) * std::pow(xd + 1.0, a - m) * power(tn + alpha, m) -
          m * power(phi, m - 1.0) * std::pow(xd, a - m + 1.0) * power(tn + alpha - 1.0, m - 1.0)) /
         (m * (m - 1.0));
}

/// Prequential increment under alpha, beta -> 0.
inline double poisson_preq_improper(std::uint64_t x, std::uint64_t t_prev, std::uint64_t step,
                                    const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  const double n = static_cast<double>(step);
  const double tn = static_cast<double>(t_prev + x);
  const double head = power(tn, m) / (m * std::pow(n, m));
  if (x == 0) return head;
  const double xd = static_cast<double>(x);
  return std::pow(xd + 1.0, a - m) * head -
         std::pow(xd, a - m + 1.0) * power(tn - 1.0, m - 1.0) / ((m - 1.0) * std::pow(n, m - 1.0));
}

// ---- Negative Binomial-Beta ----------------------------------------------

/// Single observation x under the Beta(p, q) predictive with size s.
inline double negbin_single(std::uint64_t x, double s, double p, double q, const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  if (x == 0) return power(s * p, m) * std::pow(p + q + s, -m) / m;
  const double xd = static_cast<double>(x);
  return ((m - 1.0) * std::pow(xd + 1.0, a - m) * power((xd + s) * (xd + p), m) *
              std::pow(xd + p + q + s, -m) -
          m * std::pow(xd, a - m + 1.0) * power((xd + s - 1.0) * (xd + p - 1.0), m - 1.0) *
              std::pow(xd + p + q + s - 1.0, 1.0 - m)) /
         (m * (m - 1.0));
}

/// Sufficient statistic t_N of N observations: s -> Ns.
inline double negbin_suff(std::uint64_t t_total, std::uint64_t count, double s, double p, double q,
                          const RuleParams& rule) {
  return negbin_single(t_total, static_cast<double>(count) * s, p, q, rule);
}

/// Sufficient-statistic score under p, q -> 0.
inline double negbin_suff_improper(std::uint64_t t_total, const RuleParams& rule) {
  if (t_total == 0) return 0.0;
  const double a = rule.a(), m = rule.m();
  const double t = static_cast<double>(t_total);
  return ((m - 1.0) * std::pow(t + 1.0, a - m) * std::pow(t, m) -
          m * std::pow(t, a - m + 1.0) * power(t - 1.0, m - 1.0)) /
         (m * (m - 1.0));
}

/// Prequential increment for observation x at step `step` (1-based).
inline double negbin_preq(std::uint64_t x, std::uint64_t t_prev, std::uint64_t step, double s,
                          double p, double q, const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  const double ns = static_cast<double>(step) * s;
  const double tp = static_cast<double>(t_prev);
  if (x == 0) {
    return std::pow(s, m) * power(p + tp, m) * std::pow(p + q + tp + ns, -m) / m;
  }
  const double xd = static_cast<double>(x);
  const double tn = static_cast<double>(t_prev + x);
  return ((m - 1.0) * std::pow(xd + 1.0, a - m) * power((xd + s) * (p + tn), m) *
              std::pow(p + q + tn + ns, -m) -
          m * std::pow(xd, a - m + 1.0) * power((xd + s - 1.0) * (p + tn - 1.0), m - 1.0) *
              std::pow(p + q + tn + ns - 1.0, 1.0 - m)) /
         (m * (m - 1.0));
}

/// Prequential increment under p, q -> 0.
inline double negbin_preq_improper(std::uint64_t x, std::uint64_t t_prev, std::uint64_t step,
                                   double s, const RuleParams& rule) {
  const double a = rule.a(), m = rule.m();
  const double ns = static_cast<double>(step) * s;
  const double tp = static_cast<double>(t_prev);
  if (x == 0) return std::pow(s, m) * power(tp, m) * std::pow(tp + ns, -m) / m;
  const double xd = static_cast<double>(x);
  const double tn = static_cast<double>(t_prev + x);
  return ((m - 1.0) * std::pow(xd + 1.0, a - m) * std::pow(xd + s, m) * std::pow(tn, m) *
              std::pow(tn + ns, -m) -
          m * std::pow(xd, a - m + 1.0) * power(xd + s - 1.0, m - 1.0) * power(tn - 1.0, m - 1.0) *
              std::pow(tn + ns - 1.0, 1.0 - m)) /
         (m * (m - 1.0));
}

}  // namespace closed_form

// ---- Predictive ratios ----------------------------------------------------

/// r(x) = phi (x + shape) / (x + 1).
struct PoissonRatio {
  double phi;
  double shape;
  double operator()(std::uint64_t x) const {
    const double xd = static_cast<double>(x);
    return phi * (xd + shape) / (xd + 1.0);
  }
};

/// r(x) = (x + s)(x + a) / {(x + 1)(x + b)}.
struct NegBinRatio {
  double s;
  double a;
  double b;
  double operator()(std::uint64_t x) const {
    const double xd = static_cast<double>(x);
    return (xd + s) * (xd + a) / ((xd + 1.0) * (xd + b));
  }
};

// ---- Sequential states ----------------------------------------------------

/// Poisson(k lambda) model with Gamma prior after n observations summing to t.
/// The posterior is Gamma(alpha + t, beta + n k).
class PoissonGammaState {
 public:
  explicit PoissonGammaState(double k = 1.0, PriorSpec prior = PriorSpec::usual_improper())
      : k_(k), prior_(prior) {
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw std::invalid_argument("Poisson exposure k must be positive");
    }
    if (prior.kind == PriorKind::Proper) (void)PriorSpec::proper(prior.hyper1, prior.hyper2);
  }

  double k() const noexcept { return k_; }
  const PriorSpec& prior() const noexcept { return prior_; }
  std::uint64_t t() const noexcept { return t_; }
  std::uint64_t n() const noexcept { return n_; }

  double alpha() const noexcept {
    switch (prior_.kind) {
      case PriorKind::Proper:
        return prior_.hyper1;
      case PriorKind::Jeffreys:
        return 0.5;
      case PriorKind::UsualImproper:
        break;
    }
    return 0.0;
  }
  double beta() const noexcept { return prior_.kind == PriorKind::Proper ? prior_.hyper2 : 0.0; }

  /// Ratio of the predictive for the next observation.
  PoissonRatio ratio() const noexcept {
    const double next_phi = k_ / (beta() + static_cast<double>(n_) * k_ + k_);
    return {next_phi, alpha() + static_cast<double>(t_)};
  }

  PoissonGammaState observe(std::uint64_t x) const noexcept {
    PoissonGammaState next = *this;
    next.t_ += x;
    next.n_ += 1;
    return next;
  }

  ModelStep<PoissonGammaState> step(std::uint64_t x, const RuleParams& rule) const {
    const double increment =
        prior_.kind == PriorKind::UsualImproper
            ? closed_form::poisson_preq_improper(x, t_, n_ + 1, rule)
            : closed_form::poisson_preq(x, t_, n_ + 1, k_, alpha(), beta(), rule);
    return {increment, observe(x)};
  }

 private:
  double k_;
  PriorSpec prior_;
  std::uint64_t t_ = 0;
  std::uint64_t n_ = 0;
};

/// NegBin(s; theta) model with Beta prior after n observations summing to t.
/// The posterior is Beta(p + t, q + n s).
class NegBinBetaState {
 public:
  explicit NegBinBetaState(double s = 1.0, PriorSpec prior = PriorSpec::usual_improper())
      : s_(s), prior_(prior) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("NegBin size s must be positive");
    }
    if (prior.kind == PriorKind::Proper) (void)PriorSpec::proper(prior.hyper1, prior.hyper2);
  }

  double s() const noexcept { return s_; }
  const PriorSpec& prior() const noexcept { return prior_; }
  std::uint64_t t() const noexcept { return t_; }
  std::uint64_t n() const noexcept { return n_; }

  double p() const noexcept { return prior_.kind == PriorKind::Proper ? prior_.hyper1 : 0.0; }
  double q() const noexcept {
    switch (prior_.kind) {
      case PriorKind::Proper:
        return prior_.hyper2;
      case PriorKind::Jeffreys:
        return 0.5;
      case PriorKind::UsualImproper:
        break;
    }
    return 0.0;
  }

  NegBinRatio ratio() const noexcept {
    const double t = static_cast<double>(t_);
    const double ns = static_cast<double>(n_) * s_;
    return {s_, p() + t, p() + q() + t + ns + s_};
  }

  NegBinBetaState observe(std::uint64_t x) const noexcept {
    NegBinBetaState next = *this;
    next.t_ += x;
    next.n_ += 1;
    return next;
  }

  ModelStep<NegBinBetaState> step(std::uint64_t x, const RuleParams& rule) const {
    const double increment = prior_.kind == PriorKind::UsualImproper
                                 ? closed_form::negbin_preq_improper(x, t_, n_ + 1, s_, rule)
                                 : closed_form::negbin_preq(x, t_, n_ + 1, s_, p(), q(), rule);
    return {increment, observe(x)};
  }

 private:
  double s_;
  PriorSpec prior_;
  std::uint64_t t_ = 0;
  std::uint64_t n_ = 0;
};

inline PoissonRatio poisson_predictive_ratio(const PoissonGammaState& state) {
  return state.ratio();
}

inline NegBinRatio negbin_predictive_ratio(const NegBinBetaState& state) { return state.ratio(); }

/// Scores x against the current predictive and advances the state.
/// Wherever score_point(x, poisson_predictive_ratio(state)) is defined the
/// increment equals it; the closed form also covers r(x-1) = 0 for m > 1.
inline ModelStep<PoissonGammaState> poisson_preq_step(const PoissonGammaState& state,
                                                      std::uint64_t x, const RuleParams& rule) {
  return state.step(x, rule);
}

inline ModelStep<NegBinBetaState> negbin_preq_step(const NegBinBetaState& state, std::uint64_t x,
                                                   const RuleParams& rule) {
  return state.step(x, rule);
}

/// Score of the sufficient statistic t_N of `count` observations.
inline double poisson_suff_score(std::uint64_t t_total, std::uint64_t count, double k,
                                 const PriorSpec& prior, const RuleParams& rule) {
  if (count == 0) throw std::invalid_argument("sufficient-statistic score needs N >= 1");
  const PoissonGammaState model(k, prior);
  if (prior.kind == PriorKind::UsualImproper) {
    return closed_form::poisson_suff_improper(t_total, rule);
  }
  return closed_form::poisson_suff(t_total, count, k, model.alpha(), model.beta(), rule);
}

inline double negbin_suff_score(std::uint64_t t_total, std::uint64_t count, double s,
                                const PriorSpec& prior, const RuleParams& rule) {
  if (count == 0) throw std::invalid_argument("sufficient-statistic score needs N >= 1");
  const NegBinBetaState model(s, prior);
  if (prior.kind == PriorKind::UsualImproper) {
    return closed_form::negbin_suff_improper(t_total, rule);
  }
  return closed_form::negbin_suff(t_total, count, s, model.p(), model.q(), rule);
}

/// Either conjugate model behind one sequential interface.
class ConjugateModel {
 public:
  using State = std::variant<PoissonGammaState, NegBinBetaState>;

  ConjugateModel(PoissonGammaState state) : state_(std::move(state)) {}  // NOLINT
  ConjugateModel(NegBinBetaState state) : state_(std::move(state)) {}    // NOLINT

  const State& state() const noexcept { return state_; }
  bool is_poisson() const noexcept { return std::holds_alternative<PoissonGammaState>(state_); }

  ModelStep<ConjugateModel> step(std::uint64_t x, const RuleParams& rule) const {
    return std::visit(
        [&](const auto& s) -> ModelStep<ConjugateModel> {
          auto [increment, next] = s.step(x, rule);
          return {increment, ConjugateModel(std::move(next))};
        },
        state_);
  }

  /// Sufficient-statistic score for data with this total and count.
  double suff_score(std::uint64_t t_total, std::uint64_t count, const RuleParams& rule) const {
    if (const auto* p = std::get_if<PoissonGammaState>(&state_)) {
      return poisson_suff_score(t_total, count, p->k(), p->prior(), rule);
    }
    const auto& nb = std::get<NegBinBetaState>(state_);
    return negbin_suff_score(t_total, count, nb.s(), nb.prior(), rule);
  }

 private:
  State state_;
};

}  // namespace hscore
