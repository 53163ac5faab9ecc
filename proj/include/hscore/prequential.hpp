#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hscore/conjugate.hpp"
#include "hscore/rule.hpp"

namespace hscore {

/// A model that scores the next observation against its current predictive
/// and returns its updated self.
template <class M>
concept SequentialModel = std::copy_constructible<M> &&
                          requires(const M& model, std::uint64_t x, const RuleParams& rule) {
                            { model.step(x, rule) } -> std::same_as<ModelStep<M>>;
                          };

template <SequentialModel M = ConjugateModel>
struct ModelEvaluator {
  std::string id;
  M model;
  RuleParams rule;
};

/// Reported by select_model when several models share the minimum.
inline constexpr const char* kTie = "tie";

/// Raised when a score evaluation fails mid-run.
class PrequentialError : public std::domain_error {
 public:
  PrequentialError(std::size_t step, const std::string& model, const std::string& what)
      : std::domain_error("step " + std::to_string(step) + ", model '" + model + "': " + what),
        step_(step),
        model_(model) {}

  std::size_t step() const noexcept { return step_; }
  const std::string& model() const noexcept { return model_; }

 private:
  std::size_t step_;
  std::string model_;
};

/// Per-step increments and cumulative scores for a bank of models.
/// Steps are 0-based here; step i has consumed observations 0..i.
class PrequentialTrace {
 public:
  PrequentialTrace(std::vector<std::string> ids, std::vector<std::vector<double>> increments,
                   std::vector<std::vector<double>> cumulative, std::vector<std::string> selected)
      : ids_(std::move(ids)),
        increments_(std::move(increments)),
        cumulative_(std::move(cumulative)),
        selected_(std::move(selected)) {}

  const std::vector<std::string>& model_ids() const noexcept { return ids_; }
  std::size_t steps() const noexcept { return cumulative_.size(); }
  std::size_t models() const noexcept { return ids_.size(); }

  double increment(std::size_t step, std::size_t model) const {
    return increments_.at(step).at(model);
  }
  double cumulative(std::size_t step, std::size_t model) const {
    return cumulative_.at(step).at(model);
  }
  const std::vector<std::vector<double>>& increments() const noexcept { return increments_; }
  const std::vector<std::vector<double>>& cumulative() const noexcept { return cumulative_; }
  const std::vector<std::string>& selected() const noexcept { return selected_; }

  std::size_t index_of(const std::string& id) const {
    for (std::size_t j = 0; j < ids_.size(); ++j) {
      if (ids_[j] == id) return j;
    }
    throw std::out_of_range("no model with id '" + id + "' in trace");
  }

  /// cumulative[.][wrong] - cumulative[.][right]; positive favours `right`.
  std::vector<double> difference(std::size_t wrong, std::size_t right) const {
    if (wrong >= models() || right >= models()) {
      throw std::out_of_range("model index out of range");
    }
    std::vector<double> out;
    out.reserve(steps());
    for (const auto& row : cumulative_) out.push_back(row[wrong] - row[right]);
    return out;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> increments_;
  std::vector<std::vector<double>> cumulative_;
  std::vector<std::string> selected_;
};

namespace detail {

inline std::string argmin_or_tie(std::span<const double> scores, std::span<const std::string> ids) {
  std::size_t best = 0;
  bool tie = false;
  for (std::size_t j = 1; j < scores.size(); ++j) {
    if (scores[j] < scores[best]) {
      best = j;
      tie = false;
    } else if (scores[j] == scores[best]) {
      tie = true;
    }
  }
  return tie ? std::string(kTie) : ids[best];
}

}  // namespace detail

/// Scores every observation under every model's current predictive, then
/// updates the models. Smaller cumulative score is better.
template <SequentialModel M>
PrequentialTrace run_prequential(std::span<const std::uint64_t> observations,
                                 std::span<const ModelEvaluator<M>> bank) {
  if (observations.empty()) throw std::invalid_argument("no observations to score");
  if (bank.empty()) throw std::invalid_argument("model bank is empty");
  for (const auto& evaluator : bank) {
    if (!(evaluator.rule == bank.front().rule)) {
      throw std::invalid_argument("all models in a bank must share the same scoring rule");
    }
  }

  std::vector<std::string> ids;
  std::vector<M> models;
  for (const auto& evaluator : bank) {
    ids.push_back(evaluator.id);
    models.push_back(evaluator.model);
  }
  const RuleParams rule = bank.front().rule;

  std::vector<std::vector<double>> increments(observations.size());
  std::vector<std::vector<double>> cumulative(observations.size());
  std::vector<std::string> selected(observations.size());
  std::vector<double> running(models.size(), 0.0);

  for (std::size_t i = 0; i < observations.size(); ++i) {
    increments[i].resize(models.size());
    for (std::size_t j = 0; j < models.size(); ++j) {
      try {
        auto [increment, next] = models[j].step(observations[i], rule);
        increments[i][j] = increment;
        models[j] = std::move(next);
      } catch (const std::domain_error& e) {
        throw PrequentialError(i, ids[j], e.what());
      }
      running[j] += increments[i][j];
    }
    cumulative[i] = running;
    selected[i] = detail::argmin_or_tie(cumulative[i], ids);
  }
  return PrequentialTrace(std::move(ids), std::move(increments), std::move(cumulative),
                          std::move(selected));
}

template <SequentialModel M>
PrequentialTrace run_prequential(std::span<const std::uint64_t> observations,
                                 const std::vector<ModelEvaluator<M>>& bank) {
  return run_prequential(observations, std::span<const ModelEvaluator<M>>(bank));
}

/// Model with the smallest cumulative score at `step`, or kTie.
inline std::string select_model(const PrequentialTrace& trace, std::size_t step) {
  if (step >= trace.steps()) throw std::out_of_range("step outside trace");
  return detail::argmin_or_tie(trace.cumulative()[step], trace.model_ids());
}

}  // namespace hscore
