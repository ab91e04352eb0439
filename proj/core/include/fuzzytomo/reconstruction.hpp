// Maximum-likelihood pure-state reconstruction.
//
// The stationarity condition of the Poisson likelihood over amplitudes is the
// quasi-linear equation I|phi> = J(phi)|phi> with I = sum_j t_j Lambda_j and
// J(phi) = sum_j (k_j / lambda_j(phi)) Lambda_j, where |phi> carries norm^2
// equal to (total counts) / c. Working with the normalized |psi> instead, the
// fixed point reads |psi> = J(psi)|psi> / K with K = sum_j k_j, and the
// estimator iterates
//
//   psi <- normalize((1 - alpha) psi + alpha J(psi) psi / K)
//
// halving alpha whenever a step would decrease the likelihood.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/quantum.hpp"
#include "fuzzytomo/simulation.hpp"

namespace fuzzytomo {

struct SolverOptions {
  double tolerance = 1e-10;
  int max_iterations = 10'000;
  double damping = 0.5;
  int restarts = 5;  ///< total number of starts, the first from the flat state
  double rate_floor = 1e-12;
  std::uint64_t init_seed = 0;
  /// Replaces the flat starting state of the first start.
  std::optional<PureState> initial_state;
  /// Reconstruct even if the counts fingerprint names another protocol.
  bool ignore_fingerprint = false;
  /// Keep the log-likelihood of every accepted iterate of the winning start.
  bool record_trace = false;

  void validate() const;
};

struct ReconstructionResult {
  PureState estimate;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double log_likelihood = 0.0;
  int winning_start = 0;
  std::optional<double> fidelity_vs_reference;
  std::vector<double> likelihood_trace;
};

/// sum_j [k_j ln(lambda_j t_j) - lambda_j t_j] with 0 ln 0 = 0. Returns
/// -infinity when some k_j > 0 has zero expected count.
[[nodiscard]] double log_likelihood(const Protocol& protocol, std::span<const double> counts,
                                    const PureState& psi);
[[nodiscard]] double log_likelihood(const Protocol& protocol, const CountsRecord& counts,
                                    const PureState& psi);

/// || psi - J(psi) psi / K ||. For noiseless counts (K = c) this equals
/// || I psi - J(psi) psi || / c.
[[nodiscard]] double fixed_point_residual(const Protocol& protocol,
                                          std::span<const double> counts, const PureState& psi,
                                          double rate_floor = 1e-12);

/// Reconstruction from real-valued counts. Used directly for noiseless
/// injection k_j = lambda_j t_j.
[[nodiscard]] ReconstructionResult ml_reconstruct(const Protocol& protocol,
                                                  std::span<const double> counts,
                                                  const SolverOptions& options,
                                                  const PureState* reference = nullptr);

/// Reconstruction from sampled counts; checks the protocol fingerprint.
[[nodiscard]] ReconstructionResult ml_reconstruct(const Protocol& protocol,
                                                  const CountsRecord& counts,
                                                  const SolverOptions& options,
                                                  const PureState* reference = nullptr);

/// All amplitudes 1/sqrt(s) plus a seeded complex perturbation of size 1e-3.
[[nodiscard]] PureState perturbed_flat_state(int num_photons, std::uint64_t seed);

}  // namespace fuzzytomo
