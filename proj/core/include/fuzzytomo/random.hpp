// Seeded random streams and the Poisson sampler used by the simulator.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fuzzytomo {

using Engine = std::mt19937_64;

/// SplitMix64 finalizer; a bijection on 64-bit words.
[[nodiscard]] std::uint64_t mix64(std::uint64_t x) noexcept;

/// Order-sensitive combination of words into a seed.
[[nodiscard]] std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) noexcept;

/// Independent engine for substream `index` of `seed`.
[[nodiscard]] Engine substream(std::uint64_t seed, std::uint64_t index);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
[[nodiscard]] double uniform01(Engine& engine) noexcept;

/// Exact Poisson variate. Sequential-search inversion below mean 10,
/// Hoermann's transformed rejection with squeeze (PTRS) above.
/// A mean of 0 always yields 0.
[[nodiscard]] std::int64_t sample_poisson(double mean, Engine& engine);

}  // namespace fuzzytomo
