#include <benchmark/benchmark.h>

#include "fuzzytomo/information.hpp"
#include "fuzzytomo/random.hpp"
#include "fuzzytomo/reconstruction.hpp"
#include "fuzzytomo/simulation.hpp"

using namespace fuzzytomo;

namespace {

Protocol fuzzy(int n_photons) { return build_fuzzy_protocol(octahedron_set(), n_photons, 1e5, 0.6); }

void BM_ElementRates(benchmark::State& state) {
  const int n_photons = static_cast<int>(state.range(0));
  const auto p = fuzzy(n_photons);
  const auto psi = ghz_state(n_photons);
  for (auto _ : state) benchmark::DoNotOptimize(element_rates(p, psi));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.size()));
}
BENCHMARK(BM_ElementRates)->DenseRange(1, 4);

void BM_InformationAnalysis(benchmark::State& state) {
  const int n_photons = static_cast<int>(state.range(0));
  const auto p = fuzzy(n_photons);
  const auto psi = ghz_state(n_photons);
  for (auto _ : state) benchmark::DoNotOptimize(analyze(p, psi));
}
BENCHMARK(BM_InformationAnalysis)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const int n_photons = static_cast<int>(state.range(0));
  const auto p = fuzzy(n_photons);
  const auto psi = ghz_state(n_photons);
  const auto counts = sample_counts(p, psi, 42);
  SolverOptions opts;
  opts.restarts = 1;
  for (auto _ : state) benchmark::DoNotOptimize(ml_reconstruct(p, counts, opts));
}
BENCHMARK(BM_Reconstruct)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Poisson(benchmark::State& state) {
  const double mean = static_cast<double>(state.range(0));
  Engine rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_poisson(mean, rng));
}
BENCHMARK(BM_Poisson)->Arg(1)->Arg(9)->Arg(10)->Arg(1000)->Arg(1000000);

void BM_LossSampling(benchmark::State& state) {
  const auto coeffs = analyze(fuzzy(3), ghz_state(3)).loss.coefficients;
  for (auto _ : state) benchmark::DoNotOptimize(sample_loss_distribution(coeffs, 100'000, 1));
}
BENCHMARK(BM_LossSampling)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
