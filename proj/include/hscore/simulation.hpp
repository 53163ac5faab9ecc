#pragma once

// Replicated prequential comparison of the Poisson and Negative Binomial
// models on synthetic data, with CSV and SVG output.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hscore/conjugate.hpp"
#include "hscore/prequential.hpp"
#include "hscore/rule.hpp"
#include "hscore/sampling.hpp"

namespace hscore {

inline constexpr const char* kPoissonId = "poisson";
inline constexpr const char* kNegBinId = "negbin";

struct ExperimentConfig {
  GeneratorSpec generator = GeneratorSpec::poisson(10.0);
  std::size_t steps = 1000;
  std::size_t replicates = 100;
  /// The first `plot_paths` replicates are drawn individually in the chart.
  std::size_t plot_paths = 10;
  std::uint64_t seed = 1;
  RuleParams rule{};
  PriorSpec poisson_prior = PriorSpec::usual_improper();
  PriorSpec negbin_prior = PriorSpec::usual_improper();
  /// Known constants of the two candidate models.
  double poisson_k = 1.0;
  double negbin_s = 81.0;
  std::string output = ".";

  void validate() const {
    if (steps == 0) throw std::invalid_argument("experiment needs at least one step");
    if (replicates == 0) throw std::invalid_argument("experiment needs at least one replicate");
    (void)PoissonGammaState(poisson_k, poisson_prior);
    (void)NegBinBetaState(negbin_s, negbin_prior);
    Rng probe(0);
    (void)generator(probe);
  }
};

struct ExperimentResult {
  std::string correct_id;
  std::string wrong_id;
  std::size_t plot_paths = 0;
  /// diffs[r][i]: cumulative(wrong) - cumulative(correct) after i+1 observations.
  std::vector<std::vector<double>> diffs;
  std::vector<double> mean;

  std::size_t steps() const noexcept { return mean.size(); }
  std::size_t replicates() const noexcept { return diffs.size(); }
  bool empty() const noexcept { return diffs.empty() || mean.empty(); }
};

inline std::vector<ModelEvaluator<>> make_bank(const ExperimentConfig& config) {
  return {
      {kPoissonId, ConjugateModel(PoissonGammaState(config.poisson_k, config.poisson_prior)),
       config.rule},
      {kNegBinId, ConjugateModel(NegBinBetaState(config.negbin_s, config.negbin_prior)),
       config.rule},
  };
}

/// Observations of replicate `index`.
inline std::vector<std::uint64_t> replicate_data(const ExperimentConfig& config,
                                                 std::size_t index) {
  Rng rng(replicate_seed(config.seed, index));
  std::vector<std::uint64_t> xs(config.steps);
  for (auto& x : xs) x = config.generator(rng);
  return xs;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult result;
  const bool poisson_truth = config.generator.kind == GeneratorKind::Poisson;
  result.correct_id = poisson_truth ? kPoissonId : kNegBinId;
  result.wrong_id = poisson_truth ? kNegBinId : kPoissonId;
  result.plot_paths = std::min(config.plot_paths, config.replicates);

  const auto bank = make_bank(config);
  result.diffs.reserve(config.replicates);
  for (std::size_t r = 0; r < config.replicates; ++r) {
    const auto xs = replicate_data(config, r);
    try {
      const auto trace = run_prequential(std::span<const std::uint64_t>(xs), bank);
      result.diffs.push_back(
          trace.difference(trace.index_of(result.wrong_id), trace.index_of(result.correct_id)));
    } catch (const PrequentialError& e) {
      throw std::runtime_error("replicate " + std::to_string(r) + ": " + e.what());
    }
  }

  result.mean.assign(config.steps, 0.0);
  for (const auto& row : result.diffs) {
    for (std::size_t i = 0; i < row.size(); ++i) result.mean[i] += row[i];
  }
  for (auto& v : result.mean) v /= static_cast<double>(config.replicates);
  return result;
}

namespace detail {

inline std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace detail

/// Rows `step,replicate,diff` for every replicate, then the pointwise mean
/// under replicate=mean. Steps are 1-based.
inline void write_csv(const ExperimentResult& result, std::ostream& out) {
  out << "step,replicate,diff\n";
  for (std::size_t r = 0; r < result.diffs.size(); ++r) {
    for (std::size_t i = 0; i < result.diffs[r].size(); ++i) {
      out << (i + 1) << ',' << r << ',' << detail::format_number(result.diffs[r][i]) << '\n';
    }
  }
  for (std::size_t i = 0; i < result.mean.size(); ++i) {
    out << (i + 1) << ",mean," << detail::format_number(result.mean[i]) << '\n';
  }
}

inline void export_csv(const ExperimentResult& result, const std::string& path) {
  if (result.empty()) throw std::invalid_argument("nothing to export: empty result");
  std::ostringstream os;
  write_csv(result, os);
  detail::write_file(path, os.str());
}

/// Line chart of the first plot_paths trajectories (thin, grey) and the mean
/// trajectory (bold), as a standalone SVG document.
inline std::string svg_chart(const ExperimentResult& result, const std::string& title = "") {
  if (result.empty()) throw std::invalid_argument("nothing to plot: empty result");
  constexpr double width = 800, height = 500;
  constexpr double left = 80, right = 20, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  const std::size_t n = result.steps();
  double lo = std::min(0.0, *std::min_element(result.mean.begin(), result.mean.end()));
  double hi = std::max(0.0, *std::max_element(result.mean.begin(), result.mean.end()));
  for (std::size_t r = 0; r < result.plot_paths; ++r) {
    const auto& row = result.diffs[r];
    lo = std::min(lo, *std::min_element(row.begin(), row.end()));
    hi = std::max(hi, *std::max_element(row.begin(), row.end()));
  }
  if (hi == lo) hi = lo + 1.0;

  auto px = [&](std::size_t step) {
    return left +
           (n == 1 ? 0.5 : static_cast<double>(step - 1) / static_cast<double>(n - 1)) * plot_w;
  };
  auto py = [&](double v) { return top + (hi - v) / (hi - lo) * plot_h; };
  auto fmt = [](double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
  };
  auto polyline = [&](const std::vector<double>& ys, const char* style) {
    std::string s = "<polyline fill=\"none\" ";
    s += style;
    s += " points=\"";
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (i) s += ' ';
      s += fmt(px(i + 1)) + ',' + fmt(py(ys[i]));
    }
    s += "\"/>\n";
    return s;
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  }
  // Axes and zero reference.
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << fmt(py(0.0)) << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << fmt(py(0.0)) << "\" stroke=\"#999999\" stroke-dasharray=\"4 4\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = lo + (hi - lo) * k / 4.0;
    svg << "<text x=\"" << left - 6 << "\" y=\"" << fmt(py(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::format_number(std::round(v * 100.0) / 100.0) << "</text>\n";
    const auto step = static_cast<std::size_t>(1 + std::llround((n - 1) * k / 4.0));
    svg << "<text x=\"" << fmt(px(step)) << "\" y=\"" << top + plot_h + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << step
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">n</text>\n";
  svg << "<text x=\"18\" y=\"" << top + plot_h / 2 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << top + plot_h / 2 << ")\">cumulative score difference</text>\n";

  for (std::size_t r = 0; r < result.plot_paths; ++r) {
    svg << polyline(result.diffs[r], "stroke=\"#9db3cc\" stroke-width=\"1\"");
  }
  svg << polyline(result.mean, "stroke=\"#08306b\" stroke-width=\"3\"");
  svg << "</svg>\n";
  return svg.str();
}

inline void render_svg(const ExperimentResult& result, const std::string& path,
                       const std::string& title = "") {
  detail::write_file(path, svg_chart(result, title));
}

}  // namespace hscore
