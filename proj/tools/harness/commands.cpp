#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "harness.hpp"
#include "fuzzytomo/simulation.hpp"

namespace fuzzytomo::cli {

namespace {

namespace fs = std::filesystem;

// invalid_argument is a caller mistake; anything else is numerical.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
}

void emit(const std::string& path, const Json& doc, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << doc.dump(2) << '\n';
  } else {
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
      fs::create_directories(parent);
    }
    write_json_file(path, doc);
  }
}

Protocol protocol_from_config(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("protocol config must be a JSON object");
  for (const char* key : {"variant", "N", "n"}) {
    if (!doc.contains(key)) {
      throw std::invalid_argument(std::string("protocol config is missing field '") + key + "'");
    }
  }
  try {
    const auto variant = parse_variant(doc.at("variant").get<std::string>());
    double eta = 1.0;
    if (doc.contains("eta")) {
      eta = doc.at("eta").get<double>();
    } else if (variant != ProtocolVariant::Ideal) {
      throw std::invalid_argument("protocol config is missing field 'eta'");
    }
    const auto set = projector_set_by_name(doc.value("m1_set", std::string("octahedron8")));
    return build_protocol(variant, set, doc.at("N").get<int>(), doc.at("n").get<double>(), eta);
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("malformed protocol config: ") + e.what());
  }
}

}  // namespace

int cmd_protocol(const ProtocolArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Protocol p = protocol_from_config(read_json_file(args.config_path));
    if (const auto zeros = p.zero_exposure_count(); zeros > 0) {
      err << "warning: " << zeros << " elements have zero exposure\n";
    }
    const double residual = verify_unity_decomposition(p);
    const fs::path dir(args.out_dir.value_or("."));
    fs::create_directories(dir);
    const auto path = (dir / "protocol.json").string();
    write_json_file(path, to_json(p));
    out << "elements: " << p.size() << '\n'
        << "unity_residual: " << format_decimal(residual) << '\n'
        << "fingerprint: " << protocol_fingerprint(p) << '\n'
        << "written: " << path << '\n';
    return kSuccess;
  });
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Protocol p = protocol_from_json(read_json_file(args.protocol_path));
    const PureState psi = parse_state_spec(args.state_spec);
    if (psi.num_photons() != p.num_photons()) {
      throw std::invalid_argument("state has " + std::to_string(psi.num_photons()) +
                                  " photons, protocol expects " +
                                  std::to_string(p.num_photons()));
    }
    const Json doc = args.noiseless
                         ? noiseless_counts_json(expected_counts(p, psi), protocol_fingerprint(p))
                         : to_json(sample_counts(p, psi, args.seed));
    emit(args.out_path, doc, out);
    return kSuccess;
  });
}

int cmd_reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Protocol p = protocol_from_json(read_json_file(args.protocol_path));
    const Json counts_doc = read_json_file(args.counts_path);
    const std::string expected_fp = protocol_fingerprint(p);
    const std::string found_fp = counts_doc.value("protocol_fingerprint", std::string());
    if (found_fp != expected_fp && !args.force) {
      throw std::invalid_argument("counts were recorded for protocol " + found_fp +
                                  " but the protocol file has fingerprint " + expected_fp);
    }

    std::vector<double> counts;
    if (counts_doc.value("noiseless", false)) {
      counts = counts_doc.at("counts").get<std::vector<double>>();
      for (double k : counts) {
        if (!(k >= 0.0) || !std::isfinite(k)) {
          throw std::invalid_argument("noiseless counts must be finite and non-negative");
        }
      }
    } else {
      counts = counts_from_json(counts_doc).as_weights();
    }
    if (counts.size() != p.size()) {
      throw std::invalid_argument("counts file has " + std::to_string(counts.size()) +
                                  " entries, protocol expects " + std::to_string(p.size()));
    }

    SolverOptions opts;
    if (args.solver_config_path) opts = solver_from_json(read_json_file(*args.solver_config_path));
    if (args.seed) opts.init_seed = *args.seed;
    if (args.init_state_spec) opts.initial_state = parse_state_spec(*args.init_state_spec);
    std::optional<PureState> reference;
    if (args.reference_spec) reference = parse_state_spec(*args.reference_spec);

    const auto result =
        ml_reconstruct(p, counts, opts, reference ? &*reference : nullptr);
    emit(args.out_path, to_json(result), out);
    if (!result.converged) {
      err << "error: reconstruction did not converge after " << result.iterations
          << " iterations (residual " << format_decimal(result.residual) << ")\n";
      return kNumericalFailure;
    }
    return kSuccess;
  });
}

int cmd_info(const InfoArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Protocol p = protocol_from_json(read_json_file(args.protocol_path));
    const PureState psi = parse_state_spec(args.state_spec);
    if (psi.num_photons() != p.num_photons()) {
      throw std::invalid_argument("state has " + std::to_string(psi.num_photons()) +
                                  " photons, protocol expects " +
                                  std::to_string(p.num_photons()));
    }
    const auto analysis = analyze(p, psi);
    Json doc = to_json(analysis);
    const double closed = closed_form_information(p.variant(), p.num_photons(), p.efficiency());
    doc["closed_form_information"] = closed;
    doc["protocol_fingerprint"] = protocol_fingerprint(p);

    const fs::path dir(args.out_dir.empty() ? "." : args.out_dir);
    fs::create_directories(dir);
    write_json_file((dir / "analysis.json").string(), doc);
    if (args.samples > 0) {
      const auto z = sample_loss_distribution(analysis.loss.coefficients, args.samples, args.seed);
      std::ofstream csv(dir / "z_samples.csv", std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write z_samples.csv");
      write_csv_column(csv, "z", z);
    }
    out << "h: " << format_decimal(analysis.normalized_information) << '\n'
        << "h_closed_form: " << format_decimal(closed) << '\n'
        << "mean_loss: " << format_decimal(analysis.loss.mean_loss) << '\n';
    return kSuccess;
  });
}

int cmd_experiment(const ExperimentArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    Json doc = read_json_file(args.config_path);
    if (doc.is_object()) {
      if (args.seed) doc["master_seed"] = *args.seed;
      if (args.out_dir) doc["output_dir"] = *args.out_dir;
      if (args.workers) doc["workers"] = *args.workers;
    }
    const ExperimentConfig cfg = config_from_json(doc);
    const auto report = run_experiment(cfg);
    write_report(report);
    for (const auto& p : report.pairs) {
      char line[256];
      std::snprintf(line, sizeof line, "%-24s theory %.6g", pair_label(p.variant, p.efficiency).c_str(),
                    p.theory_mean_loss);
      out << line;
      if (p.empirical_mean_loss) {
        std::snprintf(line, sizeof line, "  empirical %.6g +- %.2g  non-converged %d",
                      *p.empirical_mean_loss, *p.empirical_standard_error, p.non_converged);
        out << line;
      }
      if (p.chi_squared) {
        std::snprintf(line, sizeof line, "  chi2 p %.4g", p.chi_squared->p_value);
        out << line;
      }
      out << '\n';
    }
    if (report.convergence_failure) {
      err << "error: more than " << kMaxNonConvergedFraction * 100.0
          << "% of reconstructions failed to converge\n";
      return kNumericalFailure;
    }
    return kSuccess;
  });
}

}  // namespace fuzzytomo::cli
