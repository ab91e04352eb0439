#include "fuzzytomo/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fuzzytomo {

namespace {

constexpr double kDirectionTolerance = 1e-12;
constexpr double kSetBalanceTolerance = 1e-10;

const Eigen::Matrix2cd& pauli(int axis) {
  static const Eigen::Matrix2cd x = (Eigen::Matrix2cd() << 0, 1, 1, 0).finished();
  static const Eigen::Matrix2cd y =
      (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Eigen::Matrix2cd z = (Eigen::Matrix2cd() << 1, 0, 0, -1).finished();
  switch (axis) {
    case 0: return x;
    case 1: return y;
    default: return z;
  }
}

Eigen::Matrix2cd bloch_projector2(const BlochVector& u) {
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Identity();
  for (int a = 0; a < 3; ++a) p += u[a] * pauli(a);
  return 0.5 * p;
}

Eigen::Matrix2cd materialize2(const ChannelOperator& op) {
  if (op.kind == ChannelKind::Loss) return 0.5 * Eigen::Matrix2cd::Identity();
  return bloch_projector2(op.bloch);
}

void check_sample_size(double n) {
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw std::invalid_argument("sample size must be positive and finite");
  }
}

void check_efficiency(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("detector efficiency must lie in (0, 1], got " +
                                std::to_string(eta));
  }
}

// Exposure of an element with k registering channels:
//   t = (n s / m1^k) eta^k (1 - eta)^(N - k).
double fuzzy_exposure(double n, int num_photons, std::size_t m1, int k, double eta) {
  const double s = std::ldexp(1.0, num_photons);
  return n * s / std::pow(static_cast<double>(m1), k) * std::pow(eta, k) *
         std::pow(1.0 - eta, num_photons - k);
}

// Mixed-radix enumeration, channel 1 most significant. Digit d < m1 is
// projector d; digit m1 (only when with_loss) is the loss operator.
std::vector<ProtocolElement> enumerate_elements(const SingleQubitProjectorSet& set,
                                                int num_photons, bool with_loss) {
  const std::size_t m1 = set.size();
  const std::size_t radix = with_loss ? m1 + 1 : m1;
  std::size_t total = 1;
  for (int c = 0; c < num_photons; ++c) total *= radix;

  std::vector<ProtocolElement> out;
  out.reserve(total);
  std::vector<std::size_t> digits(num_photons, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ProtocolElement e;
    e.channel_ops.reserve(num_photons);
    for (int c = 0; c < num_photons; ++c) {
      if (digits[c] < m1) {
        e.channel_ops.push_back(
            ChannelOperator::projector(static_cast<int>(digits[c]), set.directions()[digits[c]]));
        ++e.registered_count;
      } else {
        e.channel_ops.push_back(ChannelOperator::loss());
      }
    }
    out.push_back(std::move(e));
    for (int c = num_photons - 1; c >= 0; --c) {
      if (++digits[c] < radix) break;
      digits[c] = 0;
    }
  }
  return out;
}

}  // namespace

CMatrix bloch_projector(const BlochVector& u) { return bloch_projector2(u); }

ChannelOperator ChannelOperator::projector(int index, const BlochVector& direction) {
  return ChannelOperator{ChannelKind::Projector, index, direction};
}

ChannelOperator ChannelOperator::loss() { return ChannelOperator{}; }

CMatrix ChannelOperator::materialize() const { return materialize2(*this); }

SingleQubitProjectorSet::SingleQubitProjectorSet(std::vector<BlochVector> directions,
                                                 std::string name)
    : directions_(std::move(directions)), name_(std::move(name)) {
  if (directions_.empty()) throw std::invalid_argument("projector set is empty");
  BlochVector sum = BlochVector::Zero();
  for (const auto& u : directions_) {
    if (!(std::abs(u.norm() - 1.0) <= kDirectionTolerance)) {
      throw std::invalid_argument("projector direction is not a unit Bloch vector");
    }
    sum += u;
  }
  // sum_j P(u_j) = (m1/2) I + (sum_j u_j).sigma / 2.
  if (!(0.5 * sum.cwiseAbs().maxCoeff() <= kSetBalanceTolerance)) {
    throw std::invalid_argument("projector set does not sum to a multiple of the identity");
  }
}

SingleQubitProjectorSet octahedron_set() {
  const double a = 1.0 / std::sqrt(3.0);
  std::vector<BlochVector> dirs;
  dirs.reserve(8);
  for (int sx : {1, -1})
    for (int sy : {1, -1})
      for (int sz : {1, -1}) dirs.emplace_back(sx * a, sy * a, sz * a);
  return SingleQubitProjectorSet(std::move(dirs), "octahedron8");
}

SingleQubitProjectorSet projector_set_by_name(std::string_view name) {
  if (name == "octahedron8") return octahedron_set();
  throw std::invalid_argument("unknown projector set '" + std::string(name) + "'");
}

std::string_view to_string(ProtocolVariant variant) {
  switch (variant) {
    case ProtocolVariant::Ideal: return "ideal";
    case ProtocolVariant::Fuzzy: return "fuzzy";
    case ProtocolVariant::Coincidence: return "coincidence";
  }
  return "unknown";
}

ProtocolVariant parse_variant(std::string_view name) {
  if (name == "ideal") return ProtocolVariant::Ideal;
  if (name == "fuzzy") return ProtocolVariant::Fuzzy;
  if (name == "coincidence" || name == "coinc") return ProtocolVariant::Coincidence;
  throw std::invalid_argument("unknown protocol variant '" + std::string(name) + "'");
}

Protocol::Protocol(ProtocolVariant variant, int num_photons, double sample_size,
                   double efficiency, SingleQubitProjectorSet set,
                   std::vector<ProtocolElement> elements)
    : variant_(variant),
      num_photons_(num_photons),
      sample_size_(sample_size),
      efficiency_(efficiency),
      set_(std::move(set)),
      elements_(std::move(elements)) {
  (void)hilbert_dimension(num_photons_);
  check_sample_size(sample_size_);
  check_efficiency(efficiency_);
  if (elements_.empty()) throw std::invalid_argument("protocol has no elements");

  factors_.reserve(elements_.size() * num_photons_);
  for (const auto& e : elements_) {
    if (static_cast<int>(e.channel_ops.size()) != num_photons_) {
      throw std::invalid_argument("protocol element has wrong number of channels");
    }
    if (!(e.exposure >= 0.0) || !std::isfinite(e.exposure)) {
      throw std::invalid_argument("protocol exposure must be finite and non-negative");
    }
    int k = 0;
    for (const auto& op : e.channel_ops) {
      if (op.kind == ChannelKind::Projector) {
        ++k;
        if (std::abs(op.bloch.norm() - 1.0) > kDirectionTolerance) {
          throw std::invalid_argument("channel projector has a non-unit Bloch vector");
        }
      }
      factors_.push_back(materialize2(op));
    }
    if (k != e.registered_count) {
      throw std::invalid_argument("registered_count does not match channel operators");
    }
  }
}

double Protocol::unity_constant() const {
  if (variant_ == ProtocolVariant::Coincidence) {
    return sample_size_ * std::pow(efficiency_, num_photons_);
  }
  return sample_size_;
}

CVector Protocol::apply_element(std::size_t j, const CVector& psi) const {
  const int s = dimension();
  if (psi.size() != s) throw std::invalid_argument("state dimension does not match protocol");
  CVector out = psi;
  const Eigen::Matrix2cd* f = factors_.data() + j * num_photons_;
  for (int c = 0; c < num_photons_; ++c) {
    const int stride = 1 << (num_photons_ - 1 - c);
    const Eigen::Matrix2cd& m = f[c];
    for (int base = 0; base < s; base += 2 * stride) {
      for (int i = base; i < base + stride; ++i) {
        const Complex a = out[i];
        const Complex b = out[i + stride];
        out[i] = m(0, 0) * a + m(0, 1) * b;
        out[i + stride] = m(1, 0) * a + m(1, 1) * b;
      }
    }
  }
  return out;
}

Protocol Protocol::without_zero_exposure() const {
  std::vector<ProtocolElement> kept;
  for (const auto& e : elements_) {
    if (e.exposure > 0.0) kept.push_back(e);
  }
  return Protocol(variant_, num_photons_, sample_size_, efficiency_, set_, std::move(kept));
}

std::size_t Protocol::zero_exposure_count() const {
  std::size_t n = 0;
  for (const auto& e : elements_) n += (e.exposure == 0.0);
  return n;
}

Protocol build_ideal_protocol(const SingleQubitProjectorSet& set, int num_photons,
                              double sample_size) {
  return build_coincidence_protocol(set, num_photons, sample_size, 1.0);
}

Protocol build_fuzzy_protocol(const SingleQubitProjectorSet& set, int num_photons,
                              double sample_size, double efficiency) {
  (void)hilbert_dimension(num_photons);
  check_sample_size(sample_size);
  check_efficiency(efficiency);
  auto elements = enumerate_elements(set, num_photons, /*with_loss=*/true);
  for (auto& e : elements) {
    e.exposure = fuzzy_exposure(sample_size, num_photons, set.size(), e.registered_count,
                                efficiency);
  }
  return Protocol(ProtocolVariant::Fuzzy, num_photons, sample_size, efficiency, set,
                  std::move(elements));
}

Protocol build_coincidence_protocol(const SingleQubitProjectorSet& set, int num_photons,
                                    double sample_size, double efficiency) {
  (void)hilbert_dimension(num_photons);
  check_sample_size(sample_size);
  check_efficiency(efficiency);
  auto elements = enumerate_elements(set, num_photons, /*with_loss=*/false);
  const double t = fuzzy_exposure(sample_size, num_photons, set.size(), num_photons, efficiency);
  for (auto& e : elements) e.exposure = t;
  const auto variant = efficiency == 1.0 ? ProtocolVariant::Ideal : ProtocolVariant::Coincidence;
  return Protocol(variant, num_photons, sample_size, efficiency, set, std::move(elements));
}

Protocol build_protocol(ProtocolVariant variant, const SingleQubitProjectorSet& set,
                        int num_photons, double sample_size, double efficiency) {
  switch (variant) {
    case ProtocolVariant::Ideal: return build_ideal_protocol(set, num_photons, sample_size);
    case ProtocolVariant::Fuzzy:
      return build_fuzzy_protocol(set, num_photons, sample_size, efficiency);
    case ProtocolVariant::Coincidence:
      return build_coincidence_protocol(set, num_photons, sample_size, efficiency);
  }
  throw std::invalid_argument("unknown protocol variant");
}

HermitianOperator element_operator(const ProtocolElement& element) {
  if (element.channel_ops.empty()) throw std::invalid_argument("element has no channels");
  CMatrix acc = element.channel_ops.front().materialize();
  for (std::size_t c = 1; c < element.channel_ops.size(); ++c) {
    acc = kronecker(acc, element.channel_ops[c].materialize());
  }
  return HermitianOperator(std::move(acc));
}

double element_rate(const ProtocolElement& element, const PureState& psi) {
  if (static_cast<int>(element.channel_ops.size()) != psi.num_photons()) {
    throw std::invalid_argument("element and state have different photon counts");
  }
  const auto op = element_operator(element);
  return psi.amplitudes().dot(op.entries() * psi.amplitudes()).real();
}

std::vector<double> element_rates(const Protocol& protocol, const PureState& psi) {
  if (psi.dimension() != protocol.dimension()) {
    throw std::invalid_argument("state dimension does not match protocol");
  }
  std::vector<double> out(protocol.size());
  for (std::size_t j = 0; j < protocol.size(); ++j) {
    out[j] = psi.amplitudes().dot(protocol.apply_element(j, psi.amplitudes())).real();
  }
  return out;
}

double verify_unity_decomposition(const Protocol& protocol) {
  const int s = protocol.dimension();
  // Column b of sum_j t_j Lambda_j is sum_j t_j Lambda_j e_b.
  CMatrix total = CMatrix::Zero(s, s);
  for (int b = 0; b < s; ++b) {
    CVector e = CVector::Unit(s, b);
    for (std::size_t j = 0; j < protocol.size(); ++j) {
      const double t = protocol.elements()[j].exposure;
      if (t == 0.0) continue;
      total.col(b) += t * protocol.apply_element(j, e);
    }
  }
  const double c = protocol.unity_constant();
  total -= c * CMatrix::Identity(s, s);
  return total.cwiseAbs().maxCoeff() / c;
}

}  // namespace fuzzytomo
