// Synthetic photon counts for a protocol and a true state.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/quantum.hpp"

namespace fuzzytomo {

/// Per-element event counts k_j and the seed that produced them.
struct CountsRecord {
  std::vector<std::int64_t> counts;
  std::uint64_t seed = 0;
  std::string protocol_fingerprint;

  /// Counts as doubles, the form the estimator consumes.
  [[nodiscard]] std::vector<double> as_weights() const;
};

/// lambda_j(psi) * t_j for every element.
[[nodiscard]] std::vector<double> expected_counts(const Protocol& protocol, const PureState& psi);

/// Independent Poisson draws with means expected_counts(protocol, psi).
/// Element j draws from substream (seed, j), so the result does not depend
/// on evaluation order.
[[nodiscard]] CountsRecord sample_counts(const Protocol& protocol, const PureState& psi,
                                         std::uint64_t seed);

}  // namespace fuzzytomo
