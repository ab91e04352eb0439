#include "fuzzytomo/quantum.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace fuzzytomo {

int hilbert_dimension(int num_photons) {
  if (num_photons < 1 || num_photons > 20) {
    throw std::invalid_argument("number of photons must be in [1, 20], got " +
                                std::to_string(num_photons));
  }
  return 1 << num_photons;
}

PureState::PureState(int num_photons, CVector amplitudes)
    : num_photons_(num_photons), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != hilbert_dimension(num_photons)) {
    throw std::invalid_argument("state length " + std::to_string(amplitudes_.size()) +
                                " does not match 2^" + std::to_string(num_photons));
  }
  const double norm = amplitudes_.norm();
  if (!(std::abs(norm * norm - 1.0) <= kNormTolerance)) {
    throw std::invalid_argument("state is not normalized (norm^2 = " +
                                std::to_string(norm * norm) + ")");
  }
}

PureState PureState::normalized(CVector amplitudes) {
  const auto len = amplitudes.size();
  if (len < 2 || (len & (len - 1)) != 0) {
    throw std::invalid_argument("state length must be a power of two >= 2, got " +
                                std::to_string(len));
  }
  const double norm = amplitudes.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw std::invalid_argument("cannot normalize a zero or non-finite state");
  }
  amplitudes /= norm;
  int n = 0;
  while ((Eigen::Index{1} << n) < len) ++n;
  return PureState(n, std::move(amplitudes));
}

PureState PureState::with_global_phase(double phase) const {
  return PureState(num_photons_, amplitudes_ * std::polar(1.0, phase));
}

HermitianOperator::HermitianOperator(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw std::invalid_argument("operator must be a non-empty square matrix");
  }
  const double defect = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (!(defect <= kHermitianTolerance * std::max(1.0, entries_.cwiseAbs().maxCoeff()))) {
    throw std::invalid_argument("operator is not Hermitian (defect " + std::to_string(defect) +
                                ")");
  }
}

bool HermitianOperator::is_positive_semidefinite(double tolerance) const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff() >= -tolerance;
}

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMatrix::Identity(dim, dim));
}

PureState ghz_state(int num_photons) {
  const int s = hilbert_dimension(num_photons);
  CVector amps = CVector::Zero(s);
  amps[0] = amps[s - 1] = Complex(1.0 / std::sqrt(2.0), 0.0);
  return PureState(num_photons, std::move(amps));
}

PureState basis_state(int num_photons, int index) {
  const int s = hilbert_dimension(num_photons);
  if (index < 0 || index >= s) throw std::invalid_argument("basis index out of range");
  CVector amps = CVector::Zero(s);
  amps[index] = 1.0;
  return PureState(num_photons, std::move(amps));
}

CMatrix kronecker(const CMatrix& left, const CMatrix& right) {
  CMatrix out(left.rows() * right.rows(), left.cols() * right.cols());
  for (Eigen::Index i = 0; i < left.rows(); ++i) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
      out.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) =
          left(i, j) * right;
    }
  }
  return out;
}

HermitianOperator tensor_product(std::span<const HermitianOperator> factors) {
  if (factors.empty()) throw std::invalid_argument("tensor_product of an empty list");
  CMatrix acc = factors.front().entries();
  for (const auto& f : factors.subspan(1)) acc = kronecker(acc, f.entries());
  return HermitianOperator(std::move(acc));
}

double fidelity(const PureState& a, const PureState& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("fidelity of states with different dimensions");
  }
  return std::norm(a.amplitudes().dot(b.amplitudes()));
}

double fidelity_nines(double fidelity_loss) { return -std::log10(fidelity_loss); }

RMatrix realify(const CMatrix& m) {
  const auto r = m.rows();
  const auto c = m.cols();
  RMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = m.real();
  out.topRightCorner(r, c) = -m.imag();
  out.bottomLeftCorner(r, c) = m.imag();
  out.bottomRightCorner(r, c) = m.real();
  return out;
}

RVector realify(const CVector& v) {
  RVector out(2 * v.size());
  out.head(v.size()) = v.real();
  out.tail(v.size()) = v.imag();
  return out;
}

RealifiedOperator realify_operator(const HermitianOperator& op) {
  return RealifiedOperator{realify(op.entries())};
}

RealifiedState realify_state(const PureState& state) {
  return RealifiedState{realify(state.amplitudes())};
}

}  // namespace fuzzytomo
