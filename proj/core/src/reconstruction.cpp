#include "fuzzytomo/reconstruction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fuzzytomo/random.hpp"
#include "fuzzytomo/serialization.hpp"

namespace fuzzytomo {

namespace {

// Monotonicity slack for accepting a step; matches the rounding level of a
// log-likelihood of magnitude ~1e6 summed over ~1e3 terms.
constexpr double kLikelihoodSlack = 1e-9;
constexpr double kMinDamping = 1e-12;

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Evaluation {
  double log_likelihood = 0.0;
  CVector j_psi;  // J(psi) psi
};

void validate_counts(const Protocol& protocol, std::span<const double> counts) {
  if (counts.size() != protocol.size()) {
    throw std::invalid_argument("counts length " + std::to_string(counts.size()) +
                                " does not match protocol size " +
                                std::to_string(protocol.size()));
  }
  for (double k : counts) {
    if (!(k >= 0.0) || !std::isfinite(k)) {
      throw std::invalid_argument("counts must be finite and non-negative");
    }
  }
}

Evaluation evaluate(const Protocol& protocol, std::span<const double> counts, const CVector& psi,
                    double rate_floor) {
  Evaluation ev;
  ev.j_psi = CVector::Zero(psi.size());
  CompensatedSum ll;
  bool impossible = false;
  for (std::size_t j = 0; j < protocol.size(); ++j) {
    const double t = protocol.elements()[j].exposure;
    const double k = counts[j];
    if (t == 0.0 && k == 0.0) continue;
    const CVector v = protocol.apply_element(j, psi);
    const double rate = std::max(psi.dot(v).real(), 0.0);
    const double mean = rate * t;
    ll.add(-mean);
    if (k > 0.0) {
      if (mean > 0.0) {
        ll.add(k * std::log(mean));
      } else {
        impossible = true;
      }
      ev.j_psi += (k / std::max(rate, rate_floor)) * v;
    }
  }
  ev.log_likelihood = impossible ? -std::numeric_limits<double>::infinity() : ll.value();
  return ev;
}

double total_counts(std::span<const double> counts) {
  CompensatedSum s;
  for (double k : counts) s.add(k);
  return s.value();
}

struct StartOutcome {
  CVector psi;
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;
  double log_likelihood = 0.0;
  std::vector<double> trace;
};

StartOutcome run_start(const Protocol& protocol, std::span<const double> counts, double total,
                       CVector psi, const SolverOptions& opt) {
  StartOutcome out;
  Evaluation ev = evaluate(protocol, counts, psi, opt.rate_floor);
  if (opt.record_trace) out.trace.push_back(ev.log_likelihood);

  int it = 0;
  for (;; ++it) {
    const CVector target = ev.j_psi / total;
    out.residual = (psi - target).norm();
    if (out.residual <= opt.tolerance) {
      out.converged = true;
      break;
    }
    if (it >= opt.max_iterations) break;

    bool accepted = false;
    CVector trial;
    Evaluation trial_ev;
    for (double alpha = opt.damping; alpha >= kMinDamping; alpha *= 0.5) {
      trial = (1.0 - alpha) * psi + alpha * target;
      trial.normalize();
      trial_ev = evaluate(protocol, counts, trial, opt.rate_floor);
      if (trial_ev.log_likelihood >= ev.log_likelihood - kLikelihoodSlack) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // stalled at the numerical maximum
    psi = std::move(trial);
    ev = std::move(trial_ev);
    if (opt.record_trace) out.trace.push_back(ev.log_likelihood);
  }
  out.iterations = it;
  out.log_likelihood = ev.log_likelihood;
  out.psi = std::move(psi);
  return out;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
  if (!(damping > 0.0 && damping <= 1.0)) {
    throw std::invalid_argument("damping must lie in (0, 1]");
  }
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (!(rate_floor > 0.0)) throw std::invalid_argument("rate_floor must be positive");
}

double log_likelihood(const Protocol& protocol, std::span<const double> counts,
                      const PureState& psi) {
  validate_counts(protocol, counts);
  if (psi.dimension() != protocol.dimension()) {
    throw std::invalid_argument("state dimension does not match protocol");
  }
  return evaluate(protocol, counts, psi.amplitudes(), 1e-12).log_likelihood;
}

double log_likelihood(const Protocol& protocol, const CountsRecord& counts,
                      const PureState& psi) {
  const auto w = counts.as_weights();
  return log_likelihood(protocol, w, psi);
}

double fixed_point_residual(const Protocol& protocol, std::span<const double> counts,
                            const PureState& psi, double rate_floor) {
  validate_counts(protocol, counts);
  const double total = total_counts(counts);
  if (!(total > 0.0)) throw std::invalid_argument("counts record contains no events");
  const auto ev = evaluate(protocol, counts, psi.amplitudes(), rate_floor);
  return (psi.amplitudes() - ev.j_psi / total).norm();
}

PureState perturbed_flat_state(int num_photons, std::uint64_t seed) {
  const int s = hilbert_dimension(num_photons);
  auto engine = substream(seed, 0);
  std::normal_distribution<double> normal;
  CVector amps = CVector::Constant(s, Complex(1.0 / std::sqrt(static_cast<double>(s)), 0.0));
  for (int i = 0; i < s; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    amps[i] += 1e-3 * Complex(re, im);
  }
  return PureState::normalized(std::move(amps));
}

ReconstructionResult ml_reconstruct(const Protocol& protocol, std::span<const double> counts,
                                    const SolverOptions& options, const PureState* reference) {
  options.validate();
  validate_counts(protocol, counts);
  const double total = total_counts(counts);
  if (!(total > 0.0)) throw std::invalid_argument("counts record contains no events");
  if (options.initial_state && options.initial_state->dimension() != protocol.dimension()) {
    throw std::invalid_argument("initial state dimension does not match protocol");
  }
  if (reference && reference->dimension() != protocol.dimension()) {
    throw std::invalid_argument("reference state dimension does not match protocol");
  }

  std::optional<StartOutcome> best;
  int best_index = 0;
  for (int r = 0; r < options.restarts; ++r) {
    CVector start;
    if (r == 0) {
      start = options.initial_state
                  ? options.initial_state->amplitudes()
                  : perturbed_flat_state(protocol.num_photons(), options.init_seed).amplitudes();
    } else {
      auto engine = substream(options.init_seed, static_cast<std::uint64_t>(r));
      start = haar_random_state(protocol.num_photons(), engine).amplitudes();
    }
    auto outcome = run_start(protocol, counts, total, std::move(start), options);
    // Strictly better beyond a relative tie window; ties keep the lower index.
    const bool better =
        !best || outcome.log_likelihood >
                     best->log_likelihood +
                         1e-12 * std::max(1.0, std::abs(best->log_likelihood));
    if (better) {
      best = std::move(outcome);
      best_index = r;
    }
  }

  ReconstructionResult result{
      .estimate = PureState::normalized(best->psi),
      .iterations = best->iterations,
      .converged = best->converged,
      .residual = best->residual,
      .log_likelihood = best->log_likelihood,
      .winning_start = best_index,
      .fidelity_vs_reference = std::nullopt,
      .likelihood_trace = std::move(best->trace),
  };
  if (reference) result.fidelity_vs_reference = fidelity(*reference, result.estimate);
  return result;
}

ReconstructionResult ml_reconstruct(const Protocol& protocol, const CountsRecord& counts,
                                    const SolverOptions& options, const PureState* reference) {
  if (!options.ignore_fingerprint) {
    const auto expected = protocol_fingerprint(protocol);
    if (counts.protocol_fingerprint != expected) {
      throw std::invalid_argument("counts fingerprint " + counts.protocol_fingerprint +
                                  " does not match protocol fingerprint " + expected);
    }
  }
  const auto w = counts.as_weights();
  return ml_reconstruct(protocol, w, options, reference);
}

}  // namespace fuzzytomo
