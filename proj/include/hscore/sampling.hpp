#pragma once

// Seeded generators for the two count distributions. Draws are exact
// inversions of the cumulative pmf, so a given Rng state always maps to the
// same value.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace hscore {

/// splitmix64 finaliser.
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for replicate `index` derived from a master seed.
constexpr std::uint64_t replicate_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return splitmix64(master + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

/// 64-bit Mersenne Twister (std::mt19937_64, whose output sequence is fixed
/// by the standard) with a portable 53-bit uniform conversion.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Poisson draw by sequential search from x = 0.
inline std::uint64_t sample_poisson(double rate, Rng& rng) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("Poisson rate must be positive");
  }
  double p = std::exp(-rate);
  if (p == 0.0) throw std::invalid_argument("Poisson rate too large for inversion sampling");
  const double u = rng.uniform();
  std::uint64_t x = 0;
  double cdf = p;
  while (u >= cdf) {
    ++x;
    p *= rate / static_cast<double>(x);
    cdf += p;
    // Tail mass below double resolution: the remaining cdf cannot move.
    if (p == 0.0) break;
  }
  return x;
}

/// NegBin(s; theta) draw, pmf ∝ (1-theta)^s theta^x (s+x-1)!/x!, by inversion
/// with p(x+1) = p(x) theta (s+x)/(x+1).
inline std::uint64_t sample_negbin(double s, double theta, Rng& rng) {
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("NegBin size must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("NegBin theta must lie in (0, 1)");
  double p = std::exp(s * std::log1p(-theta));
  if (p == 0.0) throw std::invalid_argument("NegBin parameters too extreme for inversion sampling");
  const double u = rng.uniform();
  std::uint64_t x = 0;
  double cdf = p;
  while (u >= cdf) {
    p *= theta * (s + static_cast<double>(x)) / static_cast<double>(x + 1);
    ++x;
    cdf += p;
    if (p == 0.0) break;
  }
  return x;
}

enum class GeneratorKind { Poisson, NegBin };

/// Data-generating distribution. Poisson uses `rate` (= k lambda); NegBin uses
/// `s` and `theta`.
struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::Poisson;
  double rate = 10.0;
  double s = 81.0;
  double theta = 0.1;

  static GeneratorSpec poisson(double rate) { return {GeneratorKind::Poisson, rate, 81.0, 0.1}; }
  static GeneratorSpec negbin(double s, double theta) {
    return {GeneratorKind::NegBin, 10.0, s, theta};
  }

  double mean() const noexcept {
    return kind == GeneratorKind::Poisson ? rate : s * theta / (1.0 - theta);
  }
  double variance() const noexcept {
    return kind == GeneratorKind::Poisson ? rate : s * theta / ((1.0 - theta) * (1.0 - theta));
  }

  std::uint64_t operator()(Rng& rng) const {
    return kind == GeneratorKind::Poisson ? sample_poisson(rate, rng)
                                          : sample_negbin(s, theta, rng);
  }
};

}  // namespace hscore
