#include "fuzzytomo/random.hpp"

#include <cmath>
#include <stdexcept>

namespace fuzzytomo {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc908ULL;
  for (auto w : words) h = mix64(h ^ mix64(w));
  return h;
}

Engine substream(std::uint64_t seed, std::uint64_t index) {
  return Engine(derive_seed({seed, index}));
}

double uniform01(Engine& engine) noexcept {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

namespace {

std::int64_t poisson_inversion(double mean, Engine& engine) {
  // Sequential search from 0; the probability of running past 1000 terms
  // for mean < 10 is far below double resolution.
  const double u = uniform01(engine);
  double p = std::exp(-mean);
  double cdf = p;
  std::int64_t k = 0;
  while (u >= cdf && k < 1000) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

// W. Hoermann, "The transformed rejection method for generating Poisson
// random variables", Insurance: Mathematics and Economics 12 (1993).
std::int64_t poisson_ptrs(double mean, Engine& engine) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform01(engine) - 0.5;
    const double v = uniform01(engine);
    const double us = 0.5 - std::abs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
    const double rhs = -mean + kf * loglam - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return static_cast<std::int64_t>(kf);
  }
}

}  // namespace

std::int64_t sample_poisson(double mean, Engine& engine) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::invalid_argument("Poisson mean must be finite and non-negative");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(mean, engine);
  return poisson_ptrs(mean, engine);
}

}  // namespace fuzzytomo
