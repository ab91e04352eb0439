#include "fuzzytomo/simulation.hpp"

#include <algorithm>

#include "fuzzytomo/random.hpp"
#include "fuzzytomo/serialization.hpp"

namespace fuzzytomo {

std::vector<double> CountsRecord::as_weights() const {
  return {counts.begin(), counts.end()};
}

std::vector<double> expected_counts(const Protocol& protocol, const PureState& psi) {
  auto rates = element_rates(protocol, psi);
  for (std::size_t j = 0; j < rates.size(); ++j) {
    // Rounding can push a zero rate slightly negative.
    rates[j] = std::max(rates[j], 0.0) * protocol.elements()[j].exposure;
  }
  return rates;
}

CountsRecord sample_counts(const Protocol& protocol, const PureState& psi, std::uint64_t seed) {
  const auto means = expected_counts(protocol, psi);
  CountsRecord record;
  record.seed = seed;
  record.protocol_fingerprint = protocol_fingerprint(protocol);
  record.counts.resize(means.size());
  for (std::size_t j = 0; j < means.size(); ++j) {
    auto engine = substream(seed, j);
    record.counts[j] = sample_poisson(means[j], engine);
  }
  return record;
}

}  // namespace fuzzytomo
