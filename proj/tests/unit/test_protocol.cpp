#include <cmath>
#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fuzzytomo/protocol.hpp"
#include "test_support.hpp"

using namespace fuzzytomo;
using testing_support::binomial;
using testing_support::element_matrix_oracle;
using testing_support::expectation_oracle;

TEST(OctahedronSet, EightCubeVertices) {
  const auto set = octahedron_set();
  ASSERT_EQ(set.size(), 8u);
  const double a = 1.0 / std::sqrt(3.0);
  EXPECT_EQ(set.directions().front(), BlochVector(a, a, a));
  EXPECT_EQ(set.directions().back(), BlochVector(-a, -a, -a));
  EXPECT_EQ(set.directions()[1], BlochVector(a, a, -a));
}

TEST(OctahedronSet, ProjectorsSumToFourIdentity) {
  const auto set = octahedron_set();
  CMatrix sum = CMatrix::Zero(2, 2);
  for (const auto& u : set.directions()) sum += bloch_projector(u);
  EXPECT_LE((sum - 4.0 * CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OctahedronSet, AntipodalProjectorsAreOrthogonal) {
  const auto set = octahedron_set();
  const auto& d = set.directions();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const CMatrix p = bloch_projector(d[i]);
    const CMatrix q = bloch_projector(d[d.size() - 1 - i]);  // sign pattern flipped
    EXPECT_LE((p * q).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((p * p - p).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(p.trace().real(), 1.0, 1e-15);
  }
}

TEST(ProjectorSet, RejectsUnbalancedOrNonUnitDirections) {
  EXPECT_THROW(SingleQubitProjectorSet({BlochVector(0, 0, 1)}), std::invalid_argument);
  EXPECT_THROW(SingleQubitProjectorSet({BlochVector(0, 0, 2), BlochVector(0, 0, -2)}),
               std::invalid_argument);
  EXPECT_NO_THROW(SingleQubitProjectorSet({BlochVector(0, 0, 1), BlochVector(0, 0, -1)}));
  EXPECT_THROW((void)projector_set_by_name("dodecahedron"), std::invalid_argument);
}

TEST(IdealProtocol, ThreePhotonExposures) {
  const auto p = build_ideal_protocol(octahedron_set(), 3, 1e5);
  ASSERT_EQ(p.size(), 512u);
  // t = n s / m = 1e5 * 8 / 512
  for (const auto& e : p.elements()) {
    EXPECT_DOUBLE_EQ(e.exposure, 1562.5);
    EXPECT_EQ(e.registered_count, 3);
  }
  EXPECT_LE(verify_unity_decomposition(p), 1e-10);
}

TEST(IdealProtocol, SinglePhotonExposures) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 800.0);
  ASSERT_EQ(p.size(), 8u);
  for (const auto& e : p.elements()) EXPECT_DOUBLE_EQ(e.exposure, 200.0);
}

TEST(IdealProtocol, InvalidArguments) {
  EXPECT_THROW((void)build_ideal_protocol(octahedron_set(), 0, 1.0), std::invalid_argument);
  EXPECT_THROW((void)build_ideal_protocol(octahedron_set(), 2, 0.0), std::invalid_argument);
  EXPECT_THROW((void)build_ideal_protocol(octahedron_set(), 2, -5.0), std::invalid_argument);
}

TEST(FuzzyProtocol, ExposuresKeyedOnRegisteredCount) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.2);
  ASSERT_EQ(p.size(), 729u);
  // Element 0 registers all three channels, the last element loses all three.
  EXPECT_EQ(p.elements().front().registered_count, 3);
  EXPECT_NEAR(p.elements().front().exposure, 12.5, 1e-12);
  EXPECT_EQ(p.elements().back().registered_count, 0);
  EXPECT_NEAR(p.elements().back().exposure, 409600.0, 1e-8);
  // Mixed radix, channel 1 most significant: element 8 is (P0, P0, Loss).
  EXPECT_EQ(p.elements()[8].channel_ops[2].kind, ChannelKind::Loss);
  EXPECT_EQ(p.elements()[8].registered_count, 2);
  EXPECT_EQ(p.elements()[9].channel_ops[1].projector_index, 1);
}

TEST(FuzzyProtocol, EfficiencyOneReducesToIdeal) {
  const auto fuzzy = build_fuzzy_protocol(octahedron_set(), 2, 1000.0, 1.0);
  EXPECT_EQ(fuzzy.zero_exposure_count(), 81u - 64u);
  const auto pruned = fuzzy.without_zero_exposure();
  const auto ideal = build_ideal_protocol(octahedron_set(), 2, 1000.0);
  EXPECT_EQ(pruned.elements(), ideal.elements());
}

TEST(FuzzyProtocol, RejectsEfficiencyOutsideUnitInterval) {
  for (double eta : {0.0, -0.1, 1.5}) {
    EXPECT_THROW((void)build_fuzzy_protocol(octahedron_set(), 2, 1.0, eta), std::invalid_argument);
    EXPECT_THROW((void)build_coincidence_protocol(octahedron_set(), 2, 1.0, eta),
                 std::invalid_argument);
  }
}

TEST(FuzzyProtocol, ExposureSumPerRegistrationClass) {
  for (int n_ph : {1, 2, 3}) {
    for (double eta : {0.2, 0.6, 1.0}) {
      const double n = 1e4;
      const auto p = build_fuzzy_protocol(octahedron_set(), n_ph, n, eta);
      std::map<int, double> sums;
      for (const auto& e : p.elements()) sums[e.registered_count] += e.exposure;
      const double s = std::pow(2.0, n_ph);
      for (int k = 0; k <= n_ph; ++k) {
        const double expected =
            n * s * binomial(n_ph, k) * std::pow(eta, k) * std::pow(1.0 - eta, n_ph - k);
        EXPECT_NEAR(sums[k], expected, 1e-9 * n * s) << "N=" << n_ph << " eta=" << eta;
      }
    }
  }
}

TEST(CoincidenceProtocol, KeepsFullRegistrationSubset) {
  const auto p = build_coincidence_protocol(octahedron_set(), 3, 1e5, 0.2);
  ASSERT_EQ(p.size(), 512u);
  for (const auto& e : p.elements()) EXPECT_NEAR(e.exposure, 12.5, 1e-12);
  EXPECT_DOUBLE_EQ(p.unity_constant(), 1e5 * 0.008);
  EXPECT_LE(verify_unity_decomposition(p), 1e-10);
}

TEST(CoincidenceProtocol, EfficiencyOneIsIdeal) {
  const auto c = build_coincidence_protocol(octahedron_set(), 3, 1e5, 1.0);
  const auto i = build_ideal_protocol(octahedron_set(), 3, 1e5);
  EXPECT_EQ(c.elements(), i.elements());
  EXPECT_EQ(c.variant(), i.variant());
}

TEST(UnityDecomposition, AllVariantsAndSizes) {
  for (int n_ph = 1; n_ph <= 4; ++n_ph) {
    EXPECT_LE(verify_unity_decomposition(build_ideal_protocol(octahedron_set(), n_ph, 1e5)),
              1e-10);
  }
  for (int n_ph = 1; n_ph <= 3; ++n_ph) {
    EXPECT_LE(verify_unity_decomposition(build_fuzzy_protocol(octahedron_set(), n_ph, 1e5, 0.37)),
              1e-10);
    EXPECT_LE(
        verify_unity_decomposition(build_coincidence_protocol(octahedron_set(), n_ph, 1e5, 0.37)),
        1e-10);
  }
}

TEST(ElementOperator, AllLossIsScaledIdentity) {
  ProtocolElement e{{ChannelOperator::loss(), ChannelOperator::loss()}, 1.0, 0};
  EXPECT_EQ(element_operator(e).entries(), 0.25 * CMatrix::Identity(4, 4));
}

TEST(ElementOperator, HorizontalProjectors) {
  const BlochVector z(0, 0, 1);
  ProtocolElement e{{ChannelOperator::projector(0, z), ChannelOperator::projector(0, z)}, 1.0, 2};
  CMatrix expected = CMatrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_LE((element_operator(e).entries() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ElementOperator, MatchesIndexOracleAndHasUnitTrace) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.3);
  for (std::size_t j = 0; j < p.size(); j += 7) {
    const auto& e = p.elements()[j];
    const CMatrix dense = element_operator(e).entries();
    EXPECT_LE((dense - element_matrix_oracle(e)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(dense.trace().real(), 1.0, 1e-14);
    EXPECT_TRUE(element_operator(e).is_positive_semidefinite());
  }
}

TEST(ElementOperator, IdempotenceByRegistrationClass) {
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.3);
  for (const auto& e : p.elements()) {
    const CMatrix op = element_operator(e).entries();
    const double scale = std::ldexp(1.0, -(3 - e.registered_count));
    EXPECT_LE((op * op - scale * op).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ElementRate, GhzExamples) {
  const auto ghz = ghz_state(3);
  const BlochVector z(0, 0, 1);
  ProtocolElement hhh{{ChannelOperator::projector(0, z), ChannelOperator::projector(0, z),
                       ChannelOperator::projector(0, z)},
                      1.0, 3};
  EXPECT_NEAR(element_rate(hhh, ghz), 0.5, 1e-15);

  ProtocolElement lost{{ChannelOperator::loss(), ChannelOperator::loss(), ChannelOperator::loss()},
                       1.0, 0};
  std::mt19937_64 rng(1);
  EXPECT_NEAR(element_rate(lost, haar_random_state(3, rng)), 0.125, 1e-15);

  const BlochVector u = BlochVector(1, 1, 1) / std::sqrt(3.0);
  ProtocolElement uuu{{ChannelOperator::projector(0, u), ChannelOperator::projector(0, u),
                       ChannelOperator::projector(0, u)},
                      1.0, 3};
  const double oracle = expectation_oracle(element_matrix_oracle(uuu), ghz.amplitudes());
  EXPECT_NEAR(element_rate(uuu, ghz), oracle, 1e-14);
  EXPECT_GT(oracle, 0.0);
}

TEST(ElementRate, FastPathMatchesDenseOracle) {
  std::mt19937_64 rng(2);
  const auto p = build_fuzzy_protocol(octahedron_set(), 3, 1e3, 0.5);
  const auto psi = haar_random_state(3, rng);
  const auto rates = element_rates(p, psi);
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double oracle = expectation_oracle(element_matrix_oracle(p.elements()[j]),
                                             psi.amplitudes());
    ASSERT_NEAR(rates[j], oracle, 1e-14);
    ASSERT_GE(rates[j], -1e-15);
    ASSERT_LE(rates[j], 1.0);
  }
}

TEST(ElementRate, DimensionMismatch) {
  const auto p = build_ideal_protocol(octahedron_set(), 2, 1.0);
  EXPECT_THROW((void)element_rate(p.elements().front(), ghz_state(3)), std::invalid_argument);
  EXPECT_THROW((void)element_rates(p, ghz_state(3)), std::invalid_argument);
}

TEST(Protocol, ExpectedTotalsAreNormalized) {
  std::mt19937_64 rng(9);
  const double n = 1e5;
  for (double eta : {0.2, 0.6}) {
    const auto ideal = build_ideal_protocol(octahedron_set(), 3, n);
    const auto fuzzy = build_fuzzy_protocol(octahedron_set(), 3, n, eta);
    const auto coinc = build_coincidence_protocol(octahedron_set(), 3, n, eta);
    for (int trial = 0; trial < 100; ++trial) {
      const auto psi = haar_random_state(3, rng);
      auto total = [&](const Protocol& p) {
        const auto r = element_rates(p, psi);
        double sum = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) sum += r[j] * p.elements()[j].exposure;
        return sum;
      };
      EXPECT_NEAR(total(ideal) / n, 1.0, 1e-8);
      EXPECT_NEAR(total(fuzzy) / n, 1.0, 1e-8);
      EXPECT_NEAR(total(coinc) / (n * std::pow(eta, 3)), 1.0, 1e-8);
    }
  }
}

TEST(Protocol, ConstructionIsDeterministic) {
  const auto a = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.4);
  const auto b = build_fuzzy_protocol(octahedron_set(), 3, 1e5, 0.4);
  EXPECT_EQ(a.elements(), b.elements());
}

TEST(Protocol, RejectsInconsistentElements) {
  const BlochVector z(0, 0, 1);
  ProtocolElement bad{{ChannelOperator::projector(0, z)}, 1.0, 0};
  EXPECT_THROW(Protocol(ProtocolVariant::Ideal, 1, 1.0, 1.0, octahedron_set(), {bad}),
               std::invalid_argument);
  ProtocolElement negative{{ChannelOperator::projector(0, z)}, -1.0, 1};
  EXPECT_THROW(Protocol(ProtocolVariant::Ideal, 1, 1.0, 1.0, octahedron_set(), {negative}),
               std::invalid_argument);
}

TEST(Protocol, VariantNames) {
  for (auto v : {ProtocolVariant::Ideal, ProtocolVariant::Fuzzy, ProtocolVariant::Coincidence}) {
    EXPECT_EQ(parse_variant(to_string(v)), v);
  }
  EXPECT_THROW((void)parse_variant("bogus"), std::invalid_argument);
}
