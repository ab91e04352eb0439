// Measurement protocols for N-photon polarization tomography.
//
// A protocol is a list of product measurement operators Lambda_j, one 2x2
// factor per photon channel, each paired with an exposure t_j. Expected
// counts for element j are lambda_j * t_j with lambda_j = <psi|Lambda_j|psi>.
//
// Three variants are supported:
//   Ideal        every channel registers; t_j = n s / m.
//   Fuzzy        each channel either registers (one of m1 projectors) or
//                loses the photon (operator I/2); t_j depends on the number
//                k of registering channels through eta^k (1 - eta)^(N - k).
//   Coincidence  the k = N subset of the fuzzy protocol, with the same
//                exposures, so sum_j t_j Lambda_j = n eta^N I.
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fuzzytomo/quantum.hpp"

namespace fuzzytomo {

using BlochVector = Eigen::Vector3d;

/// (I + u.sigma) / 2 for a unit Bloch vector u.
[[nodiscard]] CMatrix bloch_projector(const BlochVector& u);

enum class ChannelKind { Projector, Loss };

/// One tensor factor of a protocol element.
struct ChannelOperator {
  ChannelKind kind = ChannelKind::Loss;
  int projector_index = -1;  ///< index into the owning projector set; -1 for Loss
  BlochVector bloch = BlochVector::Zero();

  [[nodiscard]] static ChannelOperator projector(int index, const BlochVector& direction);
  [[nodiscard]] static ChannelOperator loss();

  [[nodiscard]] CMatrix materialize() const;

  friend bool operator==(const ChannelOperator&, const ChannelOperator&) = default;
};

/// Single-photon projector directions whose projectors sum to (m1/2) I.
class SingleQubitProjectorSet {
 public:
  SingleQubitProjectorSet(std::vector<BlochVector> directions, std::string name = "custom");

  [[nodiscard]] std::size_t size() const noexcept { return directions_.size(); }
  [[nodiscard]] const std::vector<BlochVector>& directions() const noexcept { return directions_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }

 private:
  std::vector<BlochVector> directions_;
  std::string name_;
};

/// The 8 cube vertices (+-1, +-1, +-1)/sqrt(3), sign patterns in lexicographic
/// order with + before -.
[[nodiscard]] SingleQubitProjectorSet octahedron_set();

/// Looks up a set by name ("octahedron8"). Throws std::invalid_argument.
[[nodiscard]] SingleQubitProjectorSet projector_set_by_name(std::string_view name);

struct ProtocolElement {
  std::vector<ChannelOperator> channel_ops;
  double exposure = 0.0;
  int registered_count = 0;

  friend bool operator==(const ProtocolElement&, const ProtocolElement&) = default;
};

enum class ProtocolVariant { Ideal, Fuzzy, Coincidence };

[[nodiscard]] std::string_view to_string(ProtocolVariant variant);
[[nodiscard]] ProtocolVariant parse_variant(std::string_view name);

class Protocol {
 public:
  /// Validates element shapes, registered counts and exposures (finite, >= 0).
  Protocol(ProtocolVariant variant, int num_photons, double sample_size, double efficiency,
           SingleQubitProjectorSet set, std::vector<ProtocolElement> elements);

  [[nodiscard]] ProtocolVariant variant() const noexcept { return variant_; }
  [[nodiscard]] int num_photons() const noexcept { return num_photons_; }
  [[nodiscard]] int dimension() const noexcept { return 1 << num_photons_; }
  [[nodiscard]] double sample_size() const noexcept { return sample_size_; }
  [[nodiscard]] double efficiency() const noexcept { return efficiency_; }
  [[nodiscard]] const SingleQubitProjectorSet& projector_set() const noexcept { return set_; }
  [[nodiscard]] const std::vector<ProtocolElement>& elements() const noexcept { return elements_; }
  [[nodiscard]] std::size_t size() const noexcept { return elements_.size(); }

  /// c in sum_j t_j Lambda_j = c I: n for Ideal and Fuzzy, n eta^N for Coincidence.
  [[nodiscard]] double unity_constant() const;

  /// Lambda_j |psi>, computed factor by factor without forming the s x s matrix.
  [[nodiscard]] CVector apply_element(std::size_t j, const CVector& psi) const;

  /// Copy with the zero-exposure elements removed (fuzzy protocols at eta = 1).
  [[nodiscard]] Protocol without_zero_exposure() const;

  [[nodiscard]] std::size_t zero_exposure_count() const;

 private:
  ProtocolVariant variant_;
  int num_photons_;
  double sample_size_;
  double efficiency_;
  SingleQubitProjectorSet set_;
  std::vector<ProtocolElement> elements_;
  // 2x2 factor per (element, channel), flattened element-major.
  std::vector<Eigen::Matrix2cd> factors_;
};

[[nodiscard]] Protocol build_ideal_protocol(const SingleQubitProjectorSet& set, int num_photons,
                                            double sample_size);
[[nodiscard]] Protocol build_fuzzy_protocol(const SingleQubitProjectorSet& set, int num_photons,
                                            double sample_size, double efficiency);
[[nodiscard]] Protocol build_coincidence_protocol(const SingleQubitProjectorSet& set,
                                                  int num_photons, double sample_size,
                                                  double efficiency);
[[nodiscard]] Protocol build_protocol(ProtocolVariant variant, const SingleQubitProjectorSet& set,
                                      int num_photons, double sample_size, double efficiency);

/// Dense s x s operator of a single element.
[[nodiscard]] HermitianOperator element_operator(const ProtocolElement& element);

/// Born-rule rate <psi|Lambda|psi>.
[[nodiscard]] double element_rate(const ProtocolElement& element, const PureState& psi);

/// Rates for every element of `protocol`.
[[nodiscard]] std::vector<double> element_rates(const Protocol& protocol, const PureState& psi);

/// max |sum_j t_j Lambda_j - c I| / c.
[[nodiscard]] double verify_unity_decomposition(const Protocol& protocol);

}  // namespace fuzzytomo
