// JSON documents for protocols, counts, reconstructions and analyses, plus
// single-column CSV export.
//
// Protocol document:
//   {"variant": "fuzzy", "N": 3, "n": 1e5, "eta": 0.2, "m1": 8,
//    "set": "octahedron8", "directions": [[x, y, z], ...],
//    "elements": [{"channel_ops": [0, 7, -1], "exposure": 12.5}, ...]}
// where a channel op is a projector index into "directions" or -1 for loss.
//
// Counts document:
//   {"seed": 42, "protocol_fingerprint": "fnv1a64:...", "counts": [k_0, ...]}
// with "noiseless": true marking real-valued injected expectations.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fuzzytomo/information.hpp"
#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/quantum.hpp"
#include "fuzzytomo/reconstruction.hpp"
#include "fuzzytomo/simulation.hpp"

namespace fuzzytomo {

using Json = nlohmann::json;

/// Content hash of the canonical protocol document, "fnv1a64:<16 hex digits>".
[[nodiscard]] std::string protocol_fingerprint(const Protocol& protocol);

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

[[nodiscard]] Json to_json(const Protocol& protocol);
/// Rebuilds the protocol from its header and checks the element list against it.
[[nodiscard]] Protocol protocol_from_json(const Json& doc);

[[nodiscard]] Json to_json(const PureState& state);
/// Accepts {"amplitudes": [[re, im], ...]} or a bare array; normalizes.
[[nodiscard]] PureState state_from_json(const Json& doc);

[[nodiscard]] Json to_json(const CountsRecord& record);
/// Integer counts; throws std::invalid_argument on a malformed record.
[[nodiscard]] CountsRecord counts_from_json(const Json& doc);

/// Noiseless document holding real-valued expected counts.
[[nodiscard]] Json noiseless_counts_json(std::span<const double> expected,
                                         const std::string& fingerprint);

[[nodiscard]] Json to_json(const ReconstructionResult& result);
[[nodiscard]] Json to_json(const InformationAnalysis& analysis);

/// Header row, then one value per line with 15 significant digits, LF endings.
void write_csv_column(std::ostream& out, std::string_view header, std::span<const double> values);

/// "%.15g" formatting used by every CSV writer.
[[nodiscard]] std::string format_decimal(double value);

[[nodiscard]] Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& doc);

}  // namespace fuzzytomo
