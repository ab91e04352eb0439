#include <iostream>

#ifdef FUZZYTOMO_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "harness.hpp"

using namespace fuzzytomo::cli;

int main(int argc, char** argv) {
  CLI::App app{"Pure-state multiphoton tomography with fuzzy and coincidence protocols"};
  app.require_subcommand(1);

  ProtocolArgs protocol_args;
  auto* protocol = app.add_subcommand("protocol", "Build a protocol from a config and write protocol.json");
  protocol->add_option("--config", protocol_args.config_path, "Protocol config (variant, N, n, eta, m1_set)")
      ->required()
      ->check(CLI::ExistingFile);
  protocol->add_option("--out", protocol_args.out_dir, "Output directory");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Draw Poisson counts for a state");
  simulate->add_option("--protocol", sim_args.protocol_path)->required()->check(CLI::ExistingFile);
  simulate->add_option("--state", sim_args.state_spec, "ghz:N or a state JSON file")->required();
  simulate->add_option("--seed", sim_args.seed);
  simulate->add_flag("--noiseless", sim_args.noiseless, "Write expected counts instead of samples");
  simulate->add_option("--out", sim_args.out_path, "Counts file (stdout if omitted)");

  ReconstructArgs rec_args;
  auto* reconstruct = app.add_subcommand("reconstruct", "Maximum-likelihood state estimate");
  reconstruct->add_option("--protocol", rec_args.protocol_path)->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--counts", rec_args.counts_path)->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--config", rec_args.solver_config_path, "Solver options JSON");
  reconstruct->add_option("--init-state", rec_args.init_state_spec);
  reconstruct->add_option("--reference", rec_args.reference_spec, "State to report fidelity against");
  reconstruct->add_option("--seed", rec_args.seed, "Seed for the random restarts");
  reconstruct->add_flag("--force", rec_args.force, "Ignore a protocol fingerprint mismatch");
  reconstruct->add_option("--out", rec_args.out_path, "Result file (stdout if omitted)");

  InfoArgs info_args;
  auto* info = app.add_subcommand("info", "Information matrix spectrum and loss statistics");
  info->add_option("--protocol", info_args.protocol_path)->required()->check(CLI::ExistingFile);
  info->add_option("--state", info_args.state_spec)->required();
  info->add_option("--samples", info_args.samples, "Number of z samples to export");
  info->add_option("--seed", info_args.seed);
  info->add_option("--out", info_args.out_dir, "Output directory");

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Monte Carlo comparison against theory");
  experiment->add_option("--config", exp_args.config_path)->required()->check(CLI::ExistingFile);
  experiment->add_option("--seed", exp_args.seed, "Overrides master_seed");
  experiment->add_option("--out", exp_args.out_dir, "Overrides output_dir");
  experiment->add_option("--workers", exp_args.workers)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kValidationError;
  }

  if (*protocol) return cmd_protocol(protocol_args, std::cout, std::cerr);
  if (*simulate) return cmd_simulate(sim_args, std::cout, std::cerr);
  if (*reconstruct) return cmd_reconstruct(rec_args, std::cout, std::cerr);
  if (*info) return cmd_info(info_args, std::cout, std::cerr);
  return cmd_experiment(exp_args, std::cout, std::cerr);
}
