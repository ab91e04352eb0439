#include "fuzzytomo/serialization.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fuzzytomo {

namespace {

constexpr double kExposureMatch = 1e-12;

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string protocol_fingerprint(const Protocol& protocol) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(protocol).dump())));
  return buf;
}

Json to_json(const Protocol& protocol) {
  Json dirs = Json::array();
  for (const auto& u : protocol.projector_set().directions()) dirs.push_back({u.x(), u.y(), u.z()});
  Json elements = Json::array();
  for (const auto& e : protocol.elements()) {
    Json ops = Json::array();
    for (const auto& op : e.channel_ops) ops.push_back(op.projector_index);
    elements.push_back({{"channel_ops", std::move(ops)}, {"exposure", e.exposure}});
  }
  return Json{{"variant", std::string(to_string(protocol.variant()))},
              {"N", protocol.num_photons()},
              {"n", protocol.sample_size()},
              {"eta", protocol.efficiency()},
              {"m1", protocol.projector_set().size()},
              {"set", protocol.projector_set().name()},
              {"directions", std::move(dirs)},
              {"elements", std::move(elements)}};
}

Protocol protocol_from_json(const Json& doc) {
  try {
    const auto variant = parse_variant(require(doc, "variant").get<std::string>());
    const int n_photons = require(doc, "N").get<int>();
    const double n = require(doc, "n").get<double>();
    const double eta = require(doc, "eta").get<double>();
    std::vector<BlochVector> dirs;
    for (const auto& d : require(doc, "directions")) {
      if (d.size() != 3) throw std::invalid_argument("direction must have 3 components");
      dirs.emplace_back(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
    }
    if (require(doc, "m1").get<std::size_t>() != dirs.size()) {
      throw std::invalid_argument("m1 does not match the number of directions");
    }
    const std::string name = doc.value("set", std::string("custom"));
    Protocol built = build_protocol(variant, SingleQubitProjectorSet(std::move(dirs), name),
                                    n_photons, n, eta);

    const auto& elements = require(doc, "elements");
    if (elements.size() != built.size()) {
      throw std::invalid_argument("protocol lists " + std::to_string(elements.size()) +
                                  " elements, expected " + std::to_string(built.size()));
    }
    for (std::size_t j = 0; j < built.size(); ++j) {
      const auto& want = built.elements()[j];
      const auto& got = elements[j];
      const auto ops = require(got, "channel_ops").get<std::vector<int>>();
      bool same = ops.size() == want.channel_ops.size();
      for (std::size_t c = 0; same && c < ops.size(); ++c) {
        same = ops[c] == want.channel_ops[c].projector_index;
      }
      const double t = require(got, "exposure").get<double>();
      if (!same || std::abs(t - want.exposure) > kExposureMatch * std::max(1.0, want.exposure)) {
        throw std::invalid_argument("protocol element " + std::to_string(j) +
                                    " does not match its variant and weights");
      }
    }
    return built;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed protocol document: ") + e.what());
  }
}

Json to_json(const PureState& state) {
  Json amps = Json::array();
  for (const auto& a : state.amplitudes()) amps.push_back({a.real(), a.imag()});
  return Json{{"num_photons", state.num_photons()}, {"amplitudes", std::move(amps)}};
}

PureState state_from_json(const Json& doc) {
  try {
    const Json& amps = doc.is_array() ? doc : require(doc, "amplitudes");
    CVector v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const auto& a = amps[i];
      v[i] = a.is_array() ? Complex(a.at(0).get<double>(), a.at(1).get<double>())
                          : Complex(a.get<double>(), 0.0);
    }
    // Keep already-normalized amplitudes bit-exact.
    const double norm2 = v.squaredNorm();
    if (std::abs(norm2 - 1.0) <= kNormTolerance && v.size() >= 2 &&
        (v.size() & (v.size() - 1)) == 0) {
      int n = 0;
      while ((Eigen::Index{1} << n) < v.size()) ++n;
      return PureState(n, std::move(v));
    }
    return PureState::normalized(std::move(v));
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed state document: ") + e.what());
  }
}

Json to_json(const CountsRecord& record) {
  return Json{{"seed", record.seed},
              {"protocol_fingerprint", record.protocol_fingerprint},
              {"counts", record.counts}};
}

CountsRecord counts_from_json(const Json& doc) {
  try {
    CountsRecord r;
    r.seed = require(doc, "seed").get<std::uint64_t>();
    r.protocol_fingerprint = require(doc, "protocol_fingerprint").get<std::string>();
    for (const auto& k : require(doc, "counts")) {
      if (!k.is_number_integer() || k.get<std::int64_t>() < 0) {
        throw std::invalid_argument("counts must be non-negative integers");
      }
      r.counts.push_back(k.get<std::int64_t>());
    }
    return r;
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed counts document: ") + e.what());
  }
}

Json noiseless_counts_json(std::span<const double> expected, const std::string& fingerprint) {
  return Json{{"seed", 0},
              {"noiseless", true},
              {"protocol_fingerprint", fingerprint},
              {"counts", std::vector<double>(expected.begin(), expected.end())}};
}

Json to_json(const ReconstructionResult& result) {
  Json doc = to_json(result.estimate);
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["residual"] = result.residual;
  doc["log_likelihood"] = result.log_likelihood;
  doc["winning_start"] = result.winning_start;
  if (result.fidelity_vs_reference) {
    doc["fidelity_vs_reference"] = *result.fidelity_vs_reference;
  }
  return doc;
}

Json to_json(const InformationAnalysis& analysis) {
  return Json{{"spectrum", analysis.spectrum},
              {"loss_coefficients", analysis.loss.coefficients},
              {"mean_loss", analysis.loss.mean_loss},
              {"normalized_information", analysis.normalized_information},
              {"trace", analysis.information.trace()}};
}

std::string format_decimal(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  return buf;
}

void write_csv_column(std::ostream& out, std::string_view header,
                      std::span<const double> values) {
  out << header << '\n';
  for (double v : values) out << format_decimal(v) << '\n';
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << doc.dump(2) << '\n';
}

}  // namespace fuzzytomo
