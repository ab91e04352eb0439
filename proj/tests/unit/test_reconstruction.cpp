#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuzzytomo/reconstruction.hpp"
#include "fuzzytomo/simulation.hpp"

using namespace fuzzytomo;

namespace {

PureState qubit(double theta, double phi) {
  CVector v(2);
  v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
  return PureState(1, v);
}

SolverOptions single_start() {
  SolverOptions o;
  o.restarts = 1;
  return o;
}

}  // namespace

TEST(LogLikelihood, EmptyRecordIsMinusTotalExposure) {
  std::mt19937_64 rng(1);
  const auto p = build_fuzzy_protocol(octahedron_set(), 2, 500.0, 0.3);
  const std::vector<double> zeros(p.size(), 0.0);
  for (int t = 0; t < 5; ++t) {
    EXPECT_NEAR(log_likelihood(p, zeros, haar_random_state(2, rng)), -500.0, 1e-9);
  }
}

TEST(LogLikelihood, ImpossibleEventGivesMinusInfinity) {
  const SingleQubitProjectorSet zset({BlochVector(0, 0, 1), BlochVector(0, 0, -1)});
  const auto p = build_ideal_protocol(zset, 1, 100.0);
  const std::vector<double> counts{3.0, 1.0};
  EXPECT_EQ(log_likelihood(p, counts, basis_state(1, 0)), -INFINITY);
}

TEST(LogLikelihood, NoiselessCountsPeakAtTrueState) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 1000.0);
  const auto truth = qubit(1.1, 0.4);
  const auto counts = expected_counts(p, truth);
  const double at_truth = log_likelihood(p, counts, truth);
  // Grid-search oracle over nearby Bloch angles.
  for (double dt = -0.2; dt <= 0.2001; dt += 0.05) {
    for (double dp = -0.2; dp <= 0.2001; dp += 0.05) {
      if (std::abs(dt) < 1e-9 && std::abs(dp) < 1e-9) continue;
      EXPECT_LT(log_likelihood(p, counts, qubit(1.1 + dt, 0.4 + dp)), at_truth);
    }
  }
}

TEST(LogLikelihood, ConstantShiftMovesMaximizer) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 1000.0);
  const auto truth = qubit(0.3, 0.0);
  auto counts = expected_counts(p, truth);
  const auto a = ml_reconstruct(p, counts, single_start());
  for (double& k : counts) k += 50.0;
  const auto b = ml_reconstruct(p, counts, single_start());
  ASSERT_TRUE(a.converged);
  ASSERT_TRUE(b.converged);
  EXPECT_LT(fidelity(a.estimate, b.estimate), 1.0 - 1e-4);
}

TEST(MlReconstruct, TruthIsFixedPointOfNoiselessCounts) {
  std::mt19937_64 rng(2);
  const auto psi = haar_random_state(3, rng);
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.6);
  const auto counts = expected_counts(p, psi);
  auto opt = single_start();
  opt.initial_state = psi;
  const auto r = ml_reconstruct(p, counts, opt, &psi);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_LE(r.residual, 1e-12);
  EXPECT_NEAR(*r.fidelity_vs_reference, 1.0, 1e-14);
}

TEST(MlReconstruct, FixedPointIdentityAcrossVariants) {
  std::mt19937_64 rng(3);
  const auto set = octahedron_set();
  const std::vector<Protocol> protocols{build_ideal_protocol(set, 3, 1e5),
                                        build_fuzzy_protocol(set, 3, 1e5, 0.4),
                                        build_coincidence_protocol(set, 3, 1e5, 0.4)};
  for (int t = 0; t < 50; ++t) {
    const auto psi = haar_random_state(3, rng);
    for (const auto& p : protocols) {
      EXPECT_LE(fixed_point_residual(p, expected_counts(p, psi), psi), 1e-10);
    }
  }
}

TEST(MlReconstruct, SingleQubitHighStatistics) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 1e6);
  const auto h = basis_state(1, 0);
  std::vector<double> fids;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto opt = SolverOptions{};
    opt.init_seed = seed;
    const auto r = ml_reconstruct(p, sample_counts(p, h, seed), opt, &h);
    ASSERT_TRUE(r.converged);
    fids.push_back(*r.fidelity_vs_reference);
  }
  std::sort(fids.begin(), fids.end());
  // First percentile of 100 seeds.
  EXPECT_GE(fids[0], 0.9999);
}

TEST(MlReconstruct, LikelihoodNeverDecreases) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.6);
  const auto ghz = ghz_state(3);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    SolverOptions opt;
    opt.record_trace = true;
    opt.restarts = 2;
    opt.init_seed = seed;
    const auto r = ml_reconstruct(p, sample_counts(p, ghz, seed), opt);
    ASSERT_GE(r.likelihood_trace.size(), 2u);
    for (std::size_t i = 1; i < r.likelihood_trace.size(); ++i) {
      ASSERT_GE(r.likelihood_trace[i], r.likelihood_trace[i - 1] - 1e-9) << "step " << i;
    }
  }
}

TEST(MlReconstruct, GlobalPhaseOfInitialStateIsGauge) {
  std::mt19937_64 rng(4);
  const auto p = build_ideal_protocol(octahedron_set(), 2, 1e4);
  const auto truth = haar_random_state(2, rng);
  const auto counts = sample_counts(p, truth, 7);
  const auto init = haar_random_state(2, rng);
  auto a_opt = single_start();
  a_opt.initial_state = init;
  auto b_opt = single_start();
  b_opt.initial_state = init.with_global_phase(1.234);
  const auto a = ml_reconstruct(p, counts, a_opt);
  const auto b = ml_reconstruct(p, counts, b_opt);
  EXPECT_NEAR(fidelity(a.estimate, b.estimate), 1.0, 1e-10);
}

TEST(MlReconstruct, AccuracyImprovesWithSampleSize) {
  std::mt19937_64 rng(5);
  const auto truth = haar_random_state(2, rng);
  double previous = 0.0;
  for (double n : {1e3, 1e4, 1e5}) {
    const auto p = build_ideal_protocol(octahedron_set(), 2, n);
    double mean_fid = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto opt = SolverOptions{};
      opt.restarts = 2;
      opt.init_seed = seed;
      mean_fid += *ml_reconstruct(p, sample_counts(p, truth, seed), opt, &truth)
                       .fidelity_vs_reference;
    }
    mean_fid /= 100.0;
    EXPECT_GE(mean_fid, previous) << "n = " << n;
    previous = mean_fid;
  }
}

TEST(MlReconstruct, DeterministicGivenOptions) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 2, 1e4, 0.5);
  const auto counts = sample_counts(p, ghz_state(2), 99);
  SolverOptions opt;
  opt.init_seed = 3;
  const auto a = ml_reconstruct(p, counts, opt);
  const auto b = ml_reconstruct(p, counts, opt);
  EXPECT_EQ(a.estimate.amplitudes(), b.estimate.amplitudes());
  EXPECT_EQ(a.winning_start, b.winning_start);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(MlReconstruct, NonConvergenceIsReportedNotThrown) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.6);
  SolverOptions opt;
  opt.max_iterations = 2;
  opt.restarts = 1;
  const auto r = ml_reconstruct(p, sample_counts(p, ghz_state(3), 1), opt);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 2);
  EXPECT_GT(r.residual, opt.tolerance);
  EXPECT_NEAR(r.estimate.amplitudes().norm(), 1.0, 1e-12);
}

TEST(MlReconstruct, FingerprintMismatch) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 2, 1e4, 0.5);
  const auto q = build_fuzzy_protocol(octahedron_set(), 2, 1e4, 0.6);
  const auto counts = sample_counts(q, ghz_state(2), 1);
  EXPECT_THROW((void)ml_reconstruct(p, counts, SolverOptions{}), std::invalid_argument);
  SolverOptions opt;
  opt.ignore_fingerprint = true;
  opt.restarts = 1;
  EXPECT_NO_THROW((void)ml_reconstruct(p, counts, opt));
}

TEST(MlReconstruct, RejectsInvalidInputs) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 100.0);
  EXPECT_THROW((void)ml_reconstruct(p, std::vector<double>(8, 0.0), SolverOptions{}),
               std::invalid_argument);
  EXPECT_THROW((void)ml_reconstruct(p, std::vector<double>(7, 1.0), SolverOptions{}),
               std::invalid_argument);
  SolverOptions bad;
  bad.damping = 1.5;
  EXPECT_THROW((void)ml_reconstruct(p, std::vector<double>(8, 1.0), bad), std::invalid_argument);
}
