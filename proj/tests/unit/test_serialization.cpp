#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "fuzzytomo/serialization.hpp"

using namespace fuzzytomo;

TEST(ProtocolDocument, RoundTripPreservesFingerprint) {
  for (auto v : {ProtocolVariant::Ideal, ProtocolVariant::Fuzzy, ProtocolVariant::Coincidence}) {
    const auto p = build_protocol(v, octahedron_set(), 2, 1234.5, 0.37);
    const auto doc = to_json(p);
    const auto back = protocol_from_json(Json::parse(doc.dump()));
    EXPECT_EQ(back.elements(), p.elements());
    EXPECT_EQ(protocol_fingerprint(back), protocol_fingerprint(p));
  }
}

TEST(ProtocolDocument, LayoutAndLossEncoding) {
  const auto doc = to_json(build_fuzzy_protocol(octahedron_set(), 2, 100.0, 0.5));
  EXPECT_EQ(doc["variant"], "fuzzy");
  EXPECT_EQ(doc["N"], 2);
  EXPECT_EQ(doc["m1"], 8);
  EXPECT_EQ(doc["directions"].size(), 8u);
  EXPECT_EQ(doc["elements"].size(), 81u);
  EXPECT_EQ(doc["elements"][80]["channel_ops"], Json::array({-1, -1}));
  EXPECT_EQ(doc["elements"][1]["channel_ops"], Json::array({0, 1}));
}

TEST(ProtocolDocument, TamperedDocumentsRejected) {
  auto doc = to_json(build_ideal_protocol(octahedron_set(), 2, 100.0));
  auto bad_exposure = doc;
  bad_exposure["elements"][3]["exposure"] = 1.0;
  EXPECT_THROW((void)protocol_from_json(bad_exposure), std::invalid_argument);
  auto truncated = doc;
  truncated["elements"].erase(truncated["elements"].size() - 1);
  EXPECT_THROW((void)protocol_from_json(truncated), std::invalid_argument);
  auto missing = doc;
  missing.erase("eta");
  EXPECT_THROW((void)protocol_from_json(missing), std::invalid_argument);
}

TEST(Fingerprint, DistinguishesProtocols) {
  const auto a = protocol_fingerprint(build_fuzzy_protocol(octahedron_set(), 2, 100.0, 0.5));
  const auto b = protocol_fingerprint(build_fuzzy_protocol(octahedron_set(), 2, 100.0, 0.6));
  EXPECT_NE(a, b);
  EXPECT_EQ(a.rfind("fnv1a64:", 0), 0u);
  EXPECT_EQ(a.size(), 8u + 16u);
  // Reference FNV-1a vectors.
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(CountsDocument, RoundTripAndValidation) {
  const auto p = build_ideal_protocol(octahedron_set(), 1, 1000.0);
  const auto rec = sample_counts(p, ghz_state(1), 0xFFFFFFFFFFFFFFFFULL);
  const auto back = counts_from_json(Json::parse(to_json(rec).dump()));
  EXPECT_EQ(back.counts, rec.counts);
  EXPECT_EQ(back.seed, rec.seed);
  EXPECT_EQ(back.protocol_fingerprint, rec.protocol_fingerprint);

  auto doc = to_json(rec);
  doc["counts"][0] = -3;
  EXPECT_THROW((void)counts_from_json(doc), std::invalid_argument);
  doc["counts"][0] = 2.5;
  EXPECT_THROW((void)counts_from_json(doc), std::invalid_argument);
}

TEST(StateDocument, AmplitudesRoundTripExactly) {
  std::mt19937_64 rng(1);
  const auto psi = haar_random_state(3, rng);
  const auto back = state_from_json(Json::parse(to_json(psi).dump()));
  EXPECT_EQ(back.amplitudes(), psi.amplitudes());
}

TEST(Csv, HeaderAndFifteenDigits) {
  std::ostringstream out;
  const std::vector<double> v{1.0 / 3.0, 2.0};
  write_csv_column(out, "z", v);
  EXPECT_EQ(out.str(), "z\n0.333333333333333\n2\n");
}
