// Dense complex linear algebra for small multi-photon polarization states.
//
// States live in a Hilbert space of dimension s = 2^N. Channel 1 is the
// leftmost tensor factor, i.e. the most significant bit of a basis index,
// and |H> / |V> map to bit values 0 / 1 in every channel.
#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fuzzytomo {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kPsdTolerance = 1e-10;

/// Hilbert-space dimension 2^N. Throws std::invalid_argument unless 1 <= N <= 20.
[[nodiscard]] int hilbert_dimension(int num_photons);

/// Normalized amplitude vector of an N-photon polarization state.
class PureState {
 public:
  /// Takes ownership of `amplitudes`; requires length 2^N and unit norm.
  PureState(int num_photons, CVector amplitudes);

  /// Rescales `amplitudes` to unit norm. Photon count is inferred from the length.
  [[nodiscard]] static PureState normalized(CVector amplitudes);

  [[nodiscard]] int num_photons() const noexcept { return num_photons_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(amplitudes_.size()); }
  [[nodiscard]] const CVector& amplitudes() const noexcept { return amplitudes_; }

  /// Same state multiplied by exp(i*phase).
  [[nodiscard]] PureState with_global_phase(double phase) const;

 private:
  int num_photons_;
  CVector amplitudes_;
};

/// Square complex matrix that is Hermitian within kHermitianTolerance.
///
/// Positivity is not part of the type: measurement operators are PSD, but
/// the same algebra is used for observables such as the Pauli matrices.
class HermitianOperator {
 public:
  explicit HermitianOperator(CMatrix entries);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  [[nodiscard]] const CMatrix& entries() const noexcept { return entries_; }

  [[nodiscard]] bool is_positive_semidefinite(double tolerance = kPsdTolerance) const;

  [[nodiscard]] static HermitianOperator identity(int dim);

 private:
  CMatrix entries_;
};

/// Real 2s x 2s embedding [[Re, -Im], [Im, Re]] of a complex operator.
struct RealifiedOperator {
  RMatrix entries;
};

/// Real 2s embedding (Re; Im) of a state vector.
struct RealifiedState {
  RVector entries;
};

/// (|H...H> + |V...V>) / sqrt(2).
[[nodiscard]] PureState ghz_state(int num_photons);

/// Computational basis state with the given index.
[[nodiscard]] PureState basis_state(int num_photons, int index);

/// Kronecker product of `factors` in channel order. Throws on an empty list.
[[nodiscard]] HermitianOperator tensor_product(std::span<const HermitianOperator> factors);
[[nodiscard]] CMatrix kronecker(const CMatrix& left, const CMatrix& right);

/// |<a|b>|^2.
[[nodiscard]] double fidelity(const PureState& a, const PureState& b);

/// Number of nines in the fidelity: -log10(1 - F).
[[nodiscard]] double fidelity_nines(double fidelity_loss);

[[nodiscard]] RealifiedOperator realify_operator(const HermitianOperator& op);
[[nodiscard]] RealifiedState realify_state(const PureState& state);

/// Realification of an arbitrary complex matrix. Unlike realify_operator this
/// accepts non-Hermitian input, which makes the ring homomorphism checkable.
[[nodiscard]] RMatrix realify(const CMatrix& m);
[[nodiscard]] RVector realify(const CVector& v);

/// Haar-distributed random pure state drawn from a complex Gaussian.
template <class Engine>
[[nodiscard]] PureState haar_random_state(int num_photons, Engine& engine);

}  // namespace fuzzytomo

#include <random>

namespace fuzzytomo {

template <class Engine>
PureState haar_random_state(int num_photons, Engine& engine) {
  std::normal_distribution<double> normal;
  const int s = hilbert_dimension(num_photons);
  CVector amps(s);
  for (int i = 0; i < s; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    amps[i] = Complex(re, im);
  }
  return PureState::normalized(std::move(amps));
}

}  // namespace fuzzytomo
