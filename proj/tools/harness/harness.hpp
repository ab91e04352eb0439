// Batch front end: experiment configuration, the simulate -> reconstruct
// Monte Carlo loop, and the subcommands of the `fuzzytomo` tool.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fuzzytomo/information.hpp"
#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/reconstruction.hpp"
#include "fuzzytomo/serialization.hpp"

namespace fuzzytomo::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNumericalFailure = 2 };

inline constexpr double kMaxNonConvergedFraction = 0.05;
inline constexpr double kHistogramBinWidth = 0.1;

/// "ghz:N" or a path to a JSON state document.
[[nodiscard]] PureState parse_state_spec(const std::string& spec);

/// {"ghz": N} or {"amplitudes": [[re, im], ...]}.
[[nodiscard]] PureState state_from_config(const Json& doc);

[[nodiscard]] SolverOptions solver_from_json(const Json& doc);
[[nodiscard]] Json to_json(const SolverOptions& options);

struct ExperimentConfig {
  Json state_doc;
  PureState state = ghz_state(1);
  std::vector<ProtocolVariant> variants;
  std::string m1_set = "octahedron8";
  double sample_size = 0.0;
  std::vector<double> efficiencies;
  int num_experiments = 0;
  std::uint64_t master_seed = 0;
  SolverOptions solver;
  std::string output_dir = ".";
  int workers = 1;
  std::size_t theory_samples = 1'000'000;
  int chi2_bins = 10;

  void validate() const;
};

/// Parses and validates; n, eta and the state are mandatory.
[[nodiscard]] ExperimentConfig config_from_json(const Json& doc);
[[nodiscard]] Json to_json(const ExperimentConfig& config);

/// seed = derive_seed(master_seed, variant, bits(eta), run).
[[nodiscard]] std::uint64_t run_seed(std::uint64_t master_seed, ProtocolVariant variant,
                                     double efficiency, std::uint64_t run);

struct RunRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double fidelity = 0.0;
  double loss = 0.0;
  double z = 0.0;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

struct Histogram {
  std::vector<double> edges;  ///< bins [edges[i], edges[i + 1])
  std::vector<std::int64_t> empirical;
  std::vector<double> theoretical_fraction;
};

struct PairReport {
  ProtocolVariant variant = ProtocolVariant::Ideal;
  double efficiency = 1.0;
  std::string fingerprint;
  double theory_mean_loss = 0.0;
  double normalized_information = 0.0;
  double closed_form_information = 0.0;
  std::vector<double> spectrum;
  std::vector<RunRecord> runs;
  std::optional<double> empirical_mean_loss;
  std::optional<double> empirical_standard_error;
  int non_converged = 0;
  std::optional<ChiSquaredResult> chi_squared;
  int chi_squared_bins = 0;
  Histogram histogram;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<PairReport> pairs;
  bool convergence_failure = false;
};

/// Runs every variant x eta pair. Deterministic for a given config regardless
/// of the worker count.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config);

/// Report document. The only non-deterministic field is metadata.timestamp.
[[nodiscard]] Json to_json(const ExperimentReport& report, bool with_timestamp = true);

/// Writes report.json plus per-pair runs and histogram CSVs into the config's
/// output directory.
void write_report(const ExperimentReport& report);

[[nodiscard]] std::string pair_label(ProtocolVariant variant, double efficiency);

// Subcommands. Each returns an ExitCode and reports to `out` / `err`.
struct ProtocolArgs {
  std::string config_path;
  std::optional<std::string> out_dir;
};
struct SimulateArgs {
  std::string protocol_path;
  std::string state_spec;
  std::uint64_t seed = 0;
  bool noiseless = false;
  std::string out_path;
};
struct ReconstructArgs {
  std::string protocol_path;
  std::string counts_path;
  std::optional<std::string> solver_config_path;
  std::optional<std::string> init_state_spec;
  std::optional<std::string> reference_spec;
  std::optional<std::uint64_t> seed;
  bool force = false;
  std::string out_path;
};
struct InfoArgs {
  std::string protocol_path;
  std::string state_spec;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
};
struct ExperimentArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> workers;
};

int cmd_protocol(const ProtocolArgs& args, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);
int cmd_reconstruct(const ReconstructArgs& args, std::ostream& out, std::ostream& err);
int cmd_info(const InfoArgs& args, std::ostream& out, std::ostream& err);
int cmd_experiment(const ExperimentArgs& args, std::ostream& out, std::ostream& err);

}  // namespace fuzzytomo::cli
