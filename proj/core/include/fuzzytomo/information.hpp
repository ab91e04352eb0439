// Accuracy theory for pure-state tomography.
//
// The complete information matrix of a protocol at state psi is
//
//   H = 2 sum_j (t_j / lambda_j) (L_j psi~)(L_j psi~)^T
//
// in the real embedding (L_j is the realified Lambda_j, psi~ the realified
// psi). Two of its 2s directions, the normalization direction psi~ and the
// global-phase direction (-Im psi; Re psi), carry no information. On the
// remaining 2s - 2 directions with eigenvalues h_i, the fidelity loss is
// asymptotically 1 - F = sum_i d_i xi_i^2 with d_i = 1 / (2 h_i) and
// independent standard normal xi_i.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/quantum.hpp"

namespace fuzzytomo {

/// Raised when the projected information matrix has fewer than 2s - 2
/// positive eigenvalues.
class InformationallyIncomplete : public std::runtime_error {
 public:
  InformationallyIncomplete(int deficient, int expected);
  [[nodiscard]] int deficient() const noexcept { return deficient_; }

 private:
  int deficient_;
};

struct LossStatistics {
  std::vector<double> coefficients;  ///< d_i = 1 / (2 h_i)
  double mean_loss = 0.0;            ///< sum_i d_i
};

struct InformationAnalysis {
  RMatrix information;
  std::vector<double> spectrum;  ///< descending, length 2s - 2
  LossStatistics loss;
  double normalized_information = 0.0;
};

struct ChiSquaredResult {
  double statistic = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 0.0;
};

[[nodiscard]] RMatrix information_matrix(const Protocol& protocol, const PureState& psi);

[[nodiscard]] std::vector<double> gauge_projected_spectrum(const RMatrix& information,
                                                           const PureState& psi);

/// Throws std::invalid_argument on a non-positive eigenvalue.
[[nodiscard]] LossStatistics loss_statistics(const std::vector<double>& spectrum);

/// Samples of 1 - F = sum_i d_i xi_i^2.
[[nodiscard]] std::vector<double> sample_fidelity_loss(const std::vector<double>& coefficients,
                                                       std::size_t num_samples,
                                                       std::uint64_t seed);

/// Samples of z = -log10(1 - F) under the same model.
[[nodiscard]] std::vector<double> sample_loss_distribution(
    const std::vector<double>& coefficients, std::size_t num_samples, std::uint64_t seed);

/// h = Tr(H) / (2 n s).
[[nodiscard]] double normalized_full_information(const Protocol& protocol, const PureState& psi);

/// Closed-form h for the variant: 1, eta^N, or ((1 + eta) / 2)^N.
[[nodiscard]] double closed_form_information(ProtocolVariant variant, int num_photons,
                                             double efficiency);

[[nodiscard]] InformationAnalysis analyze(const Protocol& protocol, const PureState& psi);

/// Pearson chi-squared of `empirical` against equiprobable quantile bins of
/// `theoretical`. Throws std::invalid_argument if an expected bin count is
/// below 5.
[[nodiscard]] ChiSquaredResult chi_squared_gof(std::vector<double> empirical,
                                               std::vector<double> theoretical, int num_bins);

}  // namespace fuzzytomo
