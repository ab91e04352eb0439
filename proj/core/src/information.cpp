#include "fuzzytomo/information.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <boost/math/special_functions/gamma.hpp>

#include "fuzzytomo/random.hpp"

namespace fuzzytomo {

namespace {

constexpr double kZeroRate = 1e-14;
constexpr double kZeroRateDefect = 1e-7;
constexpr double kIncompleteThreshold = 1e-10;
constexpr std::size_t kSampleBlock = 4096;

void check_dimension(const Protocol& protocol, const PureState& psi) {
  if (psi.dimension() != protocol.dimension()) {
    throw std::invalid_argument("state dimension does not match protocol");
  }
}

// Lambda_j psi and lambda_j for element j; nullopt for zero-rate elements,
// whose contribution is identically zero because Lambda_j psi = 0.
struct ElementImage {
  CVector image;
  double rate;
};

std::optional<ElementImage> element_image(const Protocol& protocol, std::size_t j,
                                          const CVector& psi) {
  CVector v = protocol.apply_element(j, psi);
  const double rate = psi.dot(v).real();
  if (rate < kZeroRate) {
    if (v.norm() >= kZeroRateDefect) {
      throw std::logic_error("zero-rate element with non-vanishing image; operator is not PSD");
    }
    return std::nullopt;
  }
  return ElementImage{std::move(v), rate};
}

}  // namespace

InformationallyIncomplete::InformationallyIncomplete(int deficient, int expected)
    : std::runtime_error("protocol is informationally incomplete: " + std::to_string(deficient) +
                         " of " + std::to_string(expected) +
                         " gauge-free directions carry no information"),
      deficient_(deficient) {}

RMatrix information_matrix(const Protocol& protocol, const PureState& psi) {
  check_dimension(protocol, psi);
  const int s = protocol.dimension();
  RMatrix h = RMatrix::Zero(2 * s, 2 * s);
  for (std::size_t j = 0; j < protocol.size(); ++j) {
    const double t = protocol.elements()[j].exposure;
    if (t == 0.0) continue;
    const auto img = element_image(protocol, j, psi.amplitudes());
    if (!img) continue;
    const RVector r = realify(img->image);
    h.noalias() += (2.0 * t / img->rate) * r * r.transpose();
  }
  return h;
}

std::vector<double> gauge_projected_spectrum(const RMatrix& information, const PureState& psi) {
  const int s = psi.dimension();
  if (information.rows() != 2 * s || information.cols() != 2 * s) {
    throw std::invalid_argument("information matrix size does not match the state");
  }
  RMatrix gauge(2 * s, 2);
  gauge.col(0) = realify(psi.amplitudes());
  gauge.col(1) = realify(CVector(Complex(0.0, 1.0) * psi.amplitudes()));

  // Columns 2.. of the full Householder Q span the complement of the gauge plane.
  const Eigen::HouseholderQR<RMatrix> qr(gauge);
  const RMatrix q = qr.householderQ();
  const RMatrix basis = q.rightCols(2 * s - 2);
  const RMatrix projected = basis.transpose() * information * basis;

  const Eigen::SelfAdjointEigenSolver<RMatrix> solver(projected, Eigen::EigenvaluesOnly);
  std::vector<double> spectrum(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(spectrum.begin(), spectrum.end(), std::greater<>());

  const double scale = information.norm();
  const double threshold = kIncompleteThreshold * scale;
  const auto deficient = std::count_if(spectrum.begin(), spectrum.end(),
                                       [&](double v) { return !(v > threshold); });
  if (deficient > 0 || !(scale > 0.0)) {
    throw InformationallyIncomplete(static_cast<int>(deficient > 0 ? deficient : 2 * s - 2),
                                    2 * s - 2);
  }
  return spectrum;
}

LossStatistics loss_statistics(const std::vector<double>& spectrum) {
  LossStatistics out;
  out.coefficients.reserve(spectrum.size());
  for (double h : spectrum) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw std::invalid_argument("information eigenvalue must be positive, got " +
                                  std::to_string(h));
    }
    out.coefficients.push_back(0.5 / h);
    out.mean_loss += 0.5 / h;
  }
  return out;
}

std::vector<double> sample_fidelity_loss(const std::vector<double>& coefficients,
                                         std::size_t num_samples, std::uint64_t seed) {
  if (num_samples < 1) throw std::invalid_argument("num_samples must be at least 1");
  std::vector<double> out(num_samples);
  for (std::size_t block = 0; block * kSampleBlock < num_samples; ++block) {
    auto engine = substream(seed, block);
    std::normal_distribution<double> normal;
    const std::size_t end = std::min(num_samples, (block + 1) * kSampleBlock);
    for (std::size_t i = block * kSampleBlock; i < end; ++i) {
      double loss = 0.0;
      for (double d : coefficients) {
        const double xi = normal(engine);
        loss += d * xi * xi;
      }
      out[i] = loss;
    }
  }
  return out;
}

std::vector<double> sample_loss_distribution(const std::vector<double>& coefficients,
                                             std::size_t num_samples, std::uint64_t seed) {
  auto z = sample_fidelity_loss(coefficients, num_samples, seed);
  for (double& v : z) v = fidelity_nines(v);
  return z;
}

double normalized_full_information(const Protocol& protocol, const PureState& psi) {
  check_dimension(protocol, psi);
  double sum = 0.0;
  for (std::size_t j = 0; j < protocol.size(); ++j) {
    const double t = protocol.elements()[j].exposure;
    if (t == 0.0) continue;
    const auto img = element_image(protocol, j, psi.amplitudes());
    if (!img) continue;
    sum += t * img->image.squaredNorm() / img->rate;
  }
  return sum / (protocol.sample_size() * protocol.dimension());
}

double closed_form_information(ProtocolVariant variant, int num_photons, double efficiency) {
  switch (variant) {
    case ProtocolVariant::Ideal: return 1.0;
    case ProtocolVariant::Coincidence: return std::pow(efficiency, num_photons);
    case ProtocolVariant::Fuzzy: return std::pow(0.5 * (1.0 + efficiency), num_photons);
  }
  throw std::invalid_argument("unknown protocol variant");
}

InformationAnalysis analyze(const Protocol& protocol, const PureState& psi) {
  InformationAnalysis out;
  out.information = information_matrix(protocol, psi);
  out.spectrum = gauge_projected_spectrum(out.information, psi);
  out.loss = loss_statistics(out.spectrum);
  out.normalized_information = normalized_full_information(protocol, psi);
  return out;
}

ChiSquaredResult chi_squared_gof(std::vector<double> empirical, std::vector<double> theoretical,
                                 int num_bins) {
  if (num_bins < 2) throw std::invalid_argument("chi-squared test needs at least 2 bins");
  if (theoretical.size() < static_cast<std::size_t>(num_bins)) {
    throw std::invalid_argument("theoretical sample is smaller than the number of bins");
  }
  std::sort(theoretical.begin(), theoretical.end());
  std::sort(empirical.begin(), empirical.end());

  // Interior edges at the i/B quantiles of the theoretical sample.
  std::vector<double> edges;
  edges.reserve(num_bins - 1);
  for (int i = 1; i < num_bins; ++i) {
    edges.push_back(theoretical[i * theoretical.size() / num_bins]);
  }

  auto bin_counts = [&](const std::vector<double>& sorted) {
    std::vector<double> counts(num_bins);
    auto lo = sorted.begin();
    for (int b = 0; b < num_bins; ++b) {
      auto hi = b + 1 < num_bins ? std::lower_bound(lo, sorted.end(), edges[b]) : sorted.end();
      counts[b] = static_cast<double>(hi - lo);
      lo = hi;
    }
    return counts;
  };

  const auto theory_counts = bin_counts(theoretical);
  const auto observed = bin_counts(empirical);
  const double n_emp = static_cast<double>(empirical.size());
  const double n_theory = static_cast<double>(theoretical.size());

  ChiSquaredResult out;
  for (int b = 0; b < num_bins; ++b) {
    const double expected = n_emp * theory_counts[b] / n_theory;
    if (expected < 5.0) {
      throw std::invalid_argument("expected count " + std::to_string(expected) + " in bin " +
                                  std::to_string(b) + " is below 5; use fewer bins");
    }
    const double diff = observed[b] - expected;
    out.statistic += diff * diff / expected;
  }
  out.degrees_of_freedom = num_bins - 1;
  out.p_value = boost::math::gamma_q(0.5 * out.degrees_of_freedom, 0.5 * out.statistic);
  return out;
}

}  // namespace fuzzytomo
