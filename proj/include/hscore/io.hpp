#pragma once

// Text formats used by the command-line tool:
//   observations  one non-negative integer per line, LF separated
//   frequencies   `value,count` rows
//   priors        improper | jeffreys | proper:h1,h2
//   experiment    JSON object keyed by ExperimentConfig field names

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hscore/conjugate.hpp"
#include "hscore/rule.hpp"
#include "hscore/simulation.hpp"
#include "json.hpp"

namespace hscore {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline bool parse_u64(std::string_view text, std::uint64_t& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

inline bool parse_double(const std::string& text, double& out) {
  if (text.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == text.size();
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// json's get<unsigned>() wraps negative numbers silently.
template <class T>
T json_unsigned(const nlohmann::json& value, const std::string& key) {
  if (!value.is_number_unsigned()) {
    throw std::invalid_argument("experiment config: '" + key + "' must be a non-negative integer");
  }
  return value.get<T>();
}

// Lines of an LF-separated document; a single trailing newline is allowed.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  if (text.empty()) return lines;
  if (text.back() == '\n') text.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find('\n', start);
    lines.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return lines;
}

}  // namespace detail

inline std::vector<std::uint64_t> parse_observations(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw DataError("no observations");
  std::vector<std::uint64_t> xs;
  xs.reserve(lines.size());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::uint64_t x = 0;
    if (!detail::parse_u64(lines[i], x)) {
      throw DataError("line " + std::to_string(i + 1) + ": expected a non-negative integer, got '" +
                      std::string(lines[i]) + "'");
    }
    xs.push_back(x);
  }
  return xs;
}

inline std::vector<std::uint64_t> read_observations(const std::string& path) {
  try {
    return parse_observations(detail::slurp(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline FrequencyTable parse_frequency_table(std::string_view text) {
  const auto lines = detail::split_lines(text);
  FrequencyTable table;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto comma = lines[i].find(',');
    std::uint64_t value = 0, count = 0;
    if (comma == std::string_view::npos || !detail::parse_u64(lines[i].substr(0, comma), value) ||
        !detail::parse_u64(lines[i].substr(comma + 1), count)) {
      throw DataError("line " + std::to_string(i + 1) + ": expected 'value,count', got '" +
                      std::string(lines[i]) + "'");
    }
    table.add(value, count);
  }
  if (table.empty()) throw DataError("no observations");
  return table;
}

inline FrequencyTable read_frequency_table(const std::string& path) {
  try {
    return parse_frequency_table(detail::slurp(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

/// "improper", "jeffreys" or "proper:h1,h2". Throws std::invalid_argument.
inline PriorSpec parse_prior(const std::string& text) {
  if (text == "improper") return PriorSpec::usual_improper();
  if (text == "jeffreys") return PriorSpec::jeffreys();
  const std::string prefix = "proper:";
  if (text.rfind(prefix, 0) == 0) {
    const auto body = text.substr(prefix.size());
    const auto comma = body.find(',');
    double h1 = 0, h2 = 0;
    if (comma != std::string::npos && detail::parse_double(body.substr(0, comma), h1) &&
        detail::parse_double(body.substr(comma + 1), h2)) {
      return PriorSpec::proper(h1, h2);
    }
  }
  throw std::invalid_argument("prior must be improper, jeffreys or proper:h1,h2 (got '" + text +
                              "')");
}

/// Candidate model by name: "poisson" (exposure k) or "negbin" (size s).
inline ConjugateModel make_model(const std::string& name, double k, double s,
                                 const PriorSpec& prior) {
  if (name == kPoissonId) return ConjugateModel(PoissonGammaState(k, prior));
  if (name == kNegBinId) return ConjugateModel(NegBinBetaState(s, prior));
  throw std::invalid_argument("model must be poisson or negbin (got '" + name + "')");
}

inline std::string format_prior(const PriorSpec& prior) {
  if (prior.kind != PriorKind::Proper) return to_string(prior.kind);
  auto shortest = [](double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
  };
  return "proper:" + shortest(prior.hyper1) + ',' + shortest(prior.hyper2);
}

/// Overwrites the fields of `config` present in `doc`. Unknown keys and bad
/// values throw std::invalid_argument.
inline void apply_config_json(ExperimentConfig& config, const nlohmann::json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "generator") {
        const auto kind = value.value("kind", std::string("poisson"));
        if (kind == "poisson") {
          config.generator = GeneratorSpec::poisson(value.value("rate", 10.0));
        } else if (kind == "negbin") {
          config.generator =
              GeneratorSpec::negbin(value.value("s", 81.0), value.value("theta", 0.1));
        } else {
          throw std::invalid_argument("generator.kind must be poisson or negbin");
        }
      } else if (key == "N") {
        config.steps = detail::json_unsigned<std::size_t>(value, key);
      } else if (key == "replicates") {
        config.replicates = detail::json_unsigned<std::size_t>(value, key);
      } else if (key == "plot_paths") {
        config.plot_paths = detail::json_unsigned<std::size_t>(value, key);
      } else if (key == "seed") {
        config.seed = detail::json_unsigned<std::uint64_t>(value, key);
      } else if (key == "rule") {
        config.rule =
            RuleParams(value.value("a", config.rule.a()), value.value("m", config.rule.m()));
      } else if (key == "poisson_prior") {
        config.poisson_prior = parse_prior(value.get<std::string>());
      } else if (key == "negbin_prior") {
        config.negbin_prior = parse_prior(value.get<std::string>());
      } else if (key == "poisson_k") {
        config.poisson_k = value.get<double>();
      } else if (key == "negbin_s") {
        config.negbin_s = value.get<double>();
      } else if (key == "output") {
        config.output = value.get<std::string>();
      } else {
        throw std::invalid_argument("unknown experiment config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("experiment config: ") + e.what());
  }
}

inline nlohmann::json config_to_json(const ExperimentConfig& config) {
  nlohmann::json generator;
  if (config.generator.kind == GeneratorKind::Poisson) {
    generator = {{"kind", "poisson"}, {"rate", config.generator.rate}};
  } else {
    generator = {{"kind", "negbin"}, {"s", config.generator.s}, {"theta", config.generator.theta}};
  }
  return {{"generator", generator},
          {"N", config.steps},
          {"replicates", config.replicates},
          {"plot_paths", config.plot_paths},
          {"seed", config.seed},
          {"rule", {{"a", config.rule.a()}, {"m", config.rule.m()}}},
          {"poisson_prior", format_prior(config.poisson_prior)},
          {"negbin_prior", format_prior(config.negbin_prior)},
          {"poisson_k", config.poisson_k},
          {"negbin_s", config.negbin_s},
          {"output", config.output}};
}

}  // namespace hscore
