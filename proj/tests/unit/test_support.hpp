// Shared helpers for the unit tests, including oracles that deliberately
// avoid the library's own code paths.
#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "fuzzytomo/protocol.hpp"
#include "fuzzytomo/quantum.hpp"

namespace testing_support {

using fuzzytomo::CMatrix;
using fuzzytomo::Complex;

inline fuzzytomo::HermitianOperator random_hermitian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CMatrix a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  return fuzzytomo::HermitianOperator(CMatrix(0.5 * (a + a.adjoint())));
}

/// 2x2 operator of one channel written out from the Pauli expansion by hand.
inline CMatrix channel_matrix_oracle(const fuzzytomo::ChannelOperator& op) {
  CMatrix m(2, 2);
  if (op.kind == fuzzytomo::ChannelKind::Loss) {
    m << 0.5, 0.0, 0.0, 0.5;
    return m;
  }
  const double x = op.bloch.x(), y = op.bloch.y(), z = op.bloch.z();
  m << 0.5 * (1 + z), Complex(0.5 * x, -0.5 * y), Complex(0.5 * x, 0.5 * y), 0.5 * (1 - z);
  return m;
}

/// Dense element operator from explicit index arithmetic: entry (a, b) is the
/// product over channels of the factor entry at the channel's bits of a, b.
inline CMatrix element_matrix_oracle(const fuzzytomo::ProtocolElement& e) {
  const int n = static_cast<int>(e.channel_ops.size());
  const int s = 1 << n;
  std::vector<CMatrix> f;
  for (const auto& op : e.channel_ops) f.push_back(channel_matrix_oracle(op));
  CMatrix out(s, s);
  for (int a = 0; a < s; ++a) {
    for (int b = 0; b < s; ++b) {
      Complex v = 1.0;
      for (int c = 0; c < n; ++c) {
        const int shift = n - 1 - c;
        v *= f[c]((a >> shift) & 1, (b >> shift) & 1);
      }
      out(a, b) = v;
    }
  }
  return out;
}

/// <psi|A|psi> summed entrywise.
inline double expectation_oracle(const CMatrix& a, const fuzzytomo::CVector& psi) {
  Complex acc = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) acc += std::conj(psi[i]) * a(i, j) * psi[j];
  return acc.real();
}

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace testing_support
