#include <bit>
#include <cmath>
#include <stdexcept>

#include "harness.hpp"
#include "fuzzytomo/random.hpp"

namespace fuzzytomo::cli {

namespace {

template <class T>
T get_required(const Json& doc, const char* key) {
  if (!doc.contains(key)) {
    throw std::invalid_argument(std::string("config is missing required field '") + key + "'");
  }
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

PureState parse_state_spec(const std::string& spec) {
  if (spec.rfind("ghz:", 0) == 0) {
    try {
      return ghz_state(std::stoi(spec.substr(4)));
    } catch (const std::logic_error&) {
      throw std::invalid_argument("bad state spec '" + spec + "'");
    }
  }
  return state_from_json(read_json_file(spec));
}

PureState state_from_config(const Json& doc) {
  if (doc.is_string()) return parse_state_spec(doc.get<std::string>());
  if (doc.is_object() && doc.contains("ghz")) return ghz_state(doc.at("ghz").get<int>());
  return state_from_json(doc);
}

SolverOptions solver_from_json(const Json& doc) {
  SolverOptions o;
  if (doc.is_null()) return o;
  try {
    o.tolerance = doc.value("tolerance", o.tolerance);
    o.max_iterations = doc.value("max_iterations", o.max_iterations);
    o.damping = doc.value("damping", o.damping);
    o.restarts = doc.value("restarts", o.restarts);
    o.rate_floor = doc.value("rate_floor", o.rate_floor);
    o.init_seed = doc.value("init_seed", o.init_seed);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("bad solver options: ") + e.what());
  }
  o.validate();
  return o;
}

Json to_json(const SolverOptions& o) {
  return Json{{"tolerance", o.tolerance},   {"max_iterations", o.max_iterations},
              {"damping", o.damping},       {"restarts", o.restarts},
              {"rate_floor", o.rate_floor}, {"init_seed", o.init_seed}};
}

void ExperimentConfig::validate() const {
  if (variants.empty()) throw std::invalid_argument("config lists no protocol variants");
  if (efficiencies.empty()) throw std::invalid_argument("config lists no efficiencies");
  if (!(sample_size > 0.0) || !std::isfinite(sample_size)) {
    throw std::invalid_argument("sample size n must be positive");
  }
  for (double eta : efficiencies) {
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw std::invalid_argument("eta entries must lie in (0, 1]");
    }
  }
  if (num_experiments < 0) throw std::invalid_argument("num_experiments must be non-negative");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (theory_samples < 1) throw std::invalid_argument("theory_samples must be at least 1");
  if (chi2_bins < 2) throw std::invalid_argument("chi2_bins must be at least 2");
  (void)projector_set_by_name(m1_set);
  solver.validate();
}

ExperimentConfig config_from_json(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c;
  if (!doc.contains("state")) throw std::invalid_argument("config is missing field 'state'");
  c.state_doc = doc.at("state");
  c.state = state_from_config(c.state_doc);

  const Json& variants = doc.contains("variants") ? doc.at("variants") : doc.value("variant", Json());
  if (variants.is_string()) {
    c.variants.push_back(parse_variant(variants.get<std::string>()));
  } else if (variants.is_array()) {
    for (const auto& v : variants) c.variants.push_back(parse_variant(v.get<std::string>()));
  } else {
    throw std::invalid_argument("config is missing field 'variants'");
  }

  c.sample_size = get_required<double>(doc, "n");
  if (!doc.contains("eta")) throw std::invalid_argument("config is missing required field 'eta'");
  const Json& eta = doc.at("eta");
  if (eta.is_array()) {
    c.efficiencies = eta.get<std::vector<double>>();
  } else {
    c.efficiencies.push_back(get_required<double>(doc, "eta"));
  }
  c.num_experiments = get_required<int>(doc, "num_experiments");
  c.master_seed = get_required<std::uint64_t>(doc, "master_seed");

  c.m1_set = doc.value("m1_set", c.m1_set);
  c.solver = solver_from_json(doc.value("solver", Json()));
  c.output_dir = doc.value("output_dir", c.output_dir);
  c.workers = doc.value("workers", c.workers);
  c.theory_samples = doc.value("theory_samples", c.theory_samples);
  c.chi2_bins = doc.value("chi2_bins", c.chi2_bins);
  c.validate();
  return c;
}

Json to_json(const ExperimentConfig& c) {
  Json variants = Json::array();
  for (auto v : c.variants) variants.push_back(std::string(to_string(v)));
  return Json{{"state", c.state_doc},
              {"variants", std::move(variants)},
              {"m1_set", c.m1_set},
              {"n", c.sample_size},
              {"eta", c.efficiencies},
              {"num_experiments", c.num_experiments},
              {"master_seed", c.master_seed},
              {"solver", to_json(c.solver)},
              {"output_dir", c.output_dir},
              {"theory_samples", c.theory_samples},
              {"chi2_bins", c.chi2_bins}};
}

std::uint64_t run_seed(std::uint64_t master_seed, ProtocolVariant variant, double efficiency,
                       std::uint64_t run) {
  return derive_seed({master_seed, static_cast<std::uint64_t>(variant),
                      std::bit_cast<std::uint64_t>(efficiency), run});
}

}  // namespace fuzzytomo::cli
