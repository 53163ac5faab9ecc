// hscore: prequential model selection for count data with homogeneous
// local scoring rules.
//
//   hscore simulate --truth poisson --out results/
//   hscore compare  --data counts.txt
//   hscore fit      --data counts.txt --a 2 --m 1.5
//   hscore score    --data counts.txt --model negbin --mode suff
//
// Exit codes: 0 success, 1 runtime or data error, 2 usage error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hscore/hscore.hpp"
#include "json.hpp"

namespace {

using nlohmann::json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Flag or validation problem detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RuleFlags {
  double a = 2.0;
  double m = 2.0;
  CLI::Option* a_opt = nullptr;
  CLI::Option* m_opt = nullptr;

  void add(CLI::App& app) {
    a_opt = app.add_option("--a", a, "rule exponent a")->capture_default_str();
    m_opt = app.add_option("--m", m, "rule order m (m > 0, m != 1)")->capture_default_str();
  }
};

struct ModelFlags {
  std::string prior = "improper";
  std::string poisson_prior;
  std::string negbin_prior;
  double k = 1.0;
  double s = 81.0;

  void add(CLI::App& app) {
    app.add_option("--prior", prior, "improper | jeffreys | proper:h1,h2 (both models)")
        ->capture_default_str();
    app.add_option("--poisson-prior", poisson_prior, "prior for the Poisson model only");
    app.add_option("--negbin-prior", negbin_prior, "prior for the NegBin model only");
    app.add_option("--k", k, "Poisson exposure k")->capture_default_str();
    app.add_option("--s", s, "NegBin size s")->capture_default_str();
  }

  hscore::PriorSpec prior_for(const std::string& model) const {
    const auto& specific = model == hscore::kPoissonId ? poisson_prior : negbin_prior;
    return hscore::parse_prior(specific.empty() ? prior : specific);
  }
};

struct DataFlags {
  std::string data;
  std::string freq;

  void add(CLI::App& app) {
    auto* d = app.add_option("--data", data, "observations, one non-negative integer per line");
    auto* f = app.add_option("--freq", freq, "frequency table, value,count per line");
    d->excludes(f);
  }

  bool has_data() const { return !data.empty(); }

  std::vector<std::uint64_t> observations(const char* command) const {
    if (!freq.empty()) {
      throw UsageError(std::string(command) +
                       ": prequential scoring needs ordered observations; use --data");
    }
    if (data.empty()) throw UsageError(std::string(command) + ": --data is required");
    return hscore::read_observations(data);
  }

  hscore::FrequencyTable table(const char* command) const {
    if (!freq.empty()) return hscore::read_frequency_table(freq);
    if (data.empty()) throw UsageError(std::string(command) + ": --data or --freq is required");
    const auto xs = hscore::read_observations(data);
    return hscore::FrequencyTable::from_observations(xs);
  }
};

hscore::RuleParams make_rule(double a, double m) {
  try {
    return hscore::RuleParams(a, m);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

template <class F>
auto usage_checked(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// ---- simulate ---------------------------------------------------------------

struct SimulateFlags {
  std::string config_file;
  std::string truth = "poisson";
  std::size_t n = 1000;
  std::size_t replicates = 100;
  std::size_t plot_paths = 10;
  std::uint64_t seed = 1;
  double rate = 10.0;
  double nb_size = 81.0;
  double nb_theta = 0.1;
  std::string out = ".";
  RuleFlags rule;
  ModelFlags model;
  CLI::App* app = nullptr;
};

void add_simulate(CLI::App& root, SimulateFlags& f) {
  f.app = root.add_subcommand("simulate", "replicated Poisson vs NegBin prequential comparison");
  auto& app = *f.app;
  app.add_option("--config", f.config_file, "JSON experiment config; flags override it");
  app.add_option("--truth", f.truth, "generating family")
      ->check(CLI::IsMember({"poisson", "negbin"}))
      ->capture_default_str();
  app.add_option("--n", f.n, "observations per sequence")->capture_default_str();
  app.add_option("--replicates", f.replicates, "number of sequences")->capture_default_str();
  app.add_option("--plot-paths", f.plot_paths, "sequences drawn individually")
      ->capture_default_str();
  app.add_option("--seed", f.seed, "master seed")->capture_default_str();
  app.add_option("--rate", f.rate, "Poisson generator rate k*lambda")->capture_default_str();
  app.add_option("--nb-size", f.nb_size, "NegBin generator size")->capture_default_str();
  app.add_option("--nb-theta", f.nb_theta, "NegBin generator theta")->capture_default_str();
  app.add_option("--out", f.out, "output directory")->capture_default_str();
  f.rule.add(app);
  f.model.add(app);
}

hscore::ExperimentConfig simulate_config(const SimulateFlags& f) {
  hscore::ExperimentConfig config;
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw std::runtime_error("cannot open config '" + f.config_file + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(f.config_file + ": " + e.what());
    }
    usage_checked([&] {
      hscore::apply_config_json(config, doc);
      return 0;
    });
  }
  const auto& app = *f.app;
  auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };

  if (given("--truth")) {
    config.generator.kind =
        f.truth == "poisson" ? hscore::GeneratorKind::Poisson : hscore::GeneratorKind::NegBin;
  }
  if (given("--rate")) config.generator.rate = f.rate;
  if (given("--nb-size")) config.generator.s = f.nb_size;
  if (given("--nb-theta")) config.generator.theta = f.nb_theta;
  if (given("--n")) config.steps = f.n;
  if (given("--replicates")) config.replicates = f.replicates;
  if (given("--plot-paths")) config.plot_paths = f.plot_paths;
  if (given("--seed")) config.seed = f.seed;
  if (given("--out")) config.output = f.out;
  if (given("--a") || given("--m")) {
    config.rule = make_rule(given("--a") ? f.rule.a : config.rule.a(),
                            given("--m") ? f.rule.m : config.rule.m());
  }
  if (given("--k")) config.poisson_k = f.model.k;
  if (given("--s")) config.negbin_s = f.model.s;
  if (given("--prior") || given("--poisson-prior")) {
    config.poisson_prior = usage_checked([&] { return f.model.prior_for(hscore::kPoissonId); });
  }
  if (given("--prior") || given("--negbin-prior")) {
    config.negbin_prior = usage_checked([&] { return f.model.prior_for(hscore::kNegBinId); });
  }
  usage_checked([&] {
    config.validate();
    return 0;
  });
  return config;
}

int run_simulate(const SimulateFlags& f) {
  const auto config = simulate_config(f);
  const auto result = hscore::run_experiment(config);

  std::filesystem::create_directories(config.output);
  const auto csv = (std::filesystem::path(config.output) / "diff.csv").string();
  const auto svg = (std::filesystem::path(config.output) / "diff.svg").string();
  hscore::export_csv(result, csv);
  const std::string title =
      config.generator.kind == hscore::GeneratorKind::Poisson
          ? "Data from Poisson(" + hscore::detail::format_number(config.generator.rate) + ")"
          : "Data from NegBin(" + hscore::detail::format_number(config.generator.s) + "; " +
                hscore::detail::format_number(config.generator.theta) + ")";
  hscore::render_svg(result, svg, title);

  std::size_t positive = 0;
  for (const auto& row : result.diffs) positive += row.back() > 0.0 ? 1 : 0;
  json out = {
      {"csv", csv},
      {"svg", svg},
      {"correct", result.correct_id},
      {"wrong", result.wrong_id},
      {"N", result.steps()},
      {"replicates", result.replicates()},
      {"mean_final", result.mean.back()},
      {"positive_final", static_cast<double>(positive) / static_cast<double>(result.replicates())},
      {"config", hscore::config_to_json(config)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---- compare ----------------------------------------------------------------

struct CompareFlags {
  DataFlags data;
  std::vector<std::string> models;
  std::string reference;
  std::string trace;
  RuleFlags rule;
  ModelFlags model;
};

void add_compare(CLI::App& root, CompareFlags& f) {
  auto* app = root.add_subcommand("compare", "prequential scores of candidate models on data");
  f.data.add(*app);
  app->add_option("--model", f.models, "candidate model (repeatable); default poisson negbin")
      ->check(CLI::IsMember({"poisson", "negbin"}));
  app->add_option("--reference", f.reference, "model treated as correct in the difference");
  app->add_option("--trace", f.trace, "write the per-step trace to this CSV file");
  f.rule.add(*app);
  f.model.add(*app);
}

int run_compare(const CompareFlags& f) {
  const auto rule = make_rule(f.rule.a, f.rule.m);
  auto names = f.models;
  if (names.empty()) names = {hscore::kPoissonId, hscore::kNegBinId};

  std::vector<hscore::ModelEvaluator<>> bank;
  for (const auto& name : names) {
    std::string id = name;
    for (int copy = 2; std::any_of(bank.begin(), bank.end(), [&](auto& e) { return e.id == id; });
         ++copy) {
      id = name + "_" + std::to_string(copy);
    }
    bank.push_back({id, usage_checked([&] {
                      return hscore::make_model(name, f.model.k, f.model.s,
                                                f.model.prior_for(name));
                    }),
                    rule});
  }
  std::size_t reference = 0;
  if (!f.reference.empty()) {
    auto it = std::find_if(bank.begin(), bank.end(), [&](auto& e) { return e.id == f.reference; });
    if (it == bank.end()) throw UsageError("--reference names no model in the bank");
    reference = static_cast<std::size_t>(it - bank.begin());
  }

  const auto xs = f.data.observations("compare");
  const auto trace = hscore::run_prequential(std::span<const std::uint64_t>(xs), bank);
  const std::size_t last = trace.steps() - 1;

  json models = json::array();
  for (std::size_t j = 0; j < trace.models(); ++j) {
    models.push_back({{"id", trace.model_ids()[j]}, {"score", trace.cumulative(last, j)}});
  }
  json difference = nullptr;
  if (trace.models() == 2) {
    difference = trace.cumulative(last, 1 - reference) - trace.cumulative(last, reference);
  }
  json out = {{"n", trace.steps()},
              {"models", models},
              {"reference", trace.model_ids()[reference]},
              {"difference", difference},
              {"selected", hscore::select_model(trace, last)}};
  std::cout << out.dump(2) << '\n';

  if (!f.trace.empty()) {
    std::ofstream csv(f.trace, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open '" + f.trace + "' for writing");
    csv << "step,x,model,increment,cumulative,selected\n";
    for (std::size_t i = 0; i < trace.steps(); ++i) {
      for (std::size_t j = 0; j < trace.models(); ++j) {
        csv << (i + 1) << ',' << xs[i] << ',' << trace.model_ids()[j] << ','
            << hscore::detail::format_number(trace.increment(i, j)) << ','
            << hscore::detail::format_number(trace.cumulative(i, j)) << ',' << trace.selected()[i]
            << '\n';
      }
    }
    if (!csv) throw std::runtime_error("failed writing '" + f.trace + "'");
  }
  return 0;
}

// ---- fit --------------------------------------------------------------------

struct FitFlags {
  DataFlags data;
  RuleFlags rule;
  std::optional<double> theta_max;
};

void add_fit(CLI::App& root, FitFlags& f) {
  auto* app = root.add_subcommand("fit", "minimum-score estimate of a Poisson mean");
  f.data.add(*app);
  f.rule.add(*app);
  app->add_option("--theta-max", f.theta_max, "upper end of the search interval");
}

int run_fit(const FitFlags& f) {
  const auto rule = make_rule(f.rule.a, f.rule.m);
  const auto freq = f.data.table("fit");
  hscore::FitOptions options;
  options.theta_max = f.theta_max;
  const auto fit = usage_checked([&] { return hscore::fit_min_score(freq, rule, options); });
  json out = {{"n", freq.total_count()},
              {"mean", freq.mean()},
              {"theta_hat", fit.theta_hat},
              {"score", fit.achieved_score},
              {"method", hscore::to_string(fit.method)},
              {"iterations", fit.iterations}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

// ---- score ------------------------------------------------------------------

struct ScoreFlags {
  DataFlags data;
  std::string model_name = "poisson";
  std::string mode = "suff";
  RuleFlags rule;
  ModelFlags model;
};

void add_score(CLI::App& root, ScoreFlags& f) {
  auto* app = root.add_subcommand("score", "total score of one model on data");
  f.data.add(*app);
  app->add_option("--model", f.model_name, "model")
      ->check(CLI::IsMember({"poisson", "negbin"}))
      ->capture_default_str();
  app->add_option("--mode", f.mode, "suff: sufficient statistic; preq: prequential total")
      ->check(CLI::IsMember({"suff", "preq"}))
      ->capture_default_str();
  f.rule.add(*app);
  f.model.add(*app);
}

int run_score(const ScoreFlags& f) {
  const auto rule = make_rule(f.rule.a, f.rule.m);
  const auto model = usage_checked([&] {
    return hscore::make_model(f.model_name, f.model.k, f.model.s, f.model.prior_for(f.model_name));
  });
  std::uint64_t n = 0, t = 0;
  double score = 0.0;
  if (f.mode == "suff") {
    const auto freq = f.data.table("score --mode suff");
    n = freq.total_count();
    t = freq.total_sum();
    score = model.suff_score(t, n, rule);
  } else {
    const auto xs = f.data.observations("score --mode preq");
    const std::vector<hscore::ModelEvaluator<>> bank{{f.model_name, model, rule}};
    const auto trace = hscore::run_prequential(std::span<const std::uint64_t>(xs), bank);
    n = xs.size();
    for (auto x : xs) t += x;
    score = trace.cumulative(trace.steps() - 1, 0);
  }
  json out = {{"model", f.model_name}, {"mode", f.mode}, {"n", n}, {"t", t}, {"score", score}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prequential model selection for count data with homogeneous scoring rules",
               "hscore"};
  app.require_subcommand(1);

  SimulateFlags simulate;
  CompareFlags compare;
  FitFlags fit;
  ScoreFlags score;
  add_simulate(app, simulate);
  add_compare(app, compare);
  add_fit(app, fit);
  add_score(app, score);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (active->get_name() == "simulate") return run_simulate(simulate);
    if (active->get_name() == "compare") return run_compare(compare);
    if (active->get_name() == "fit") return run_fit(fit);
    return run_score(score);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
