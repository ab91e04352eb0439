#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <thread>

#include "harness.hpp"
#include "fuzzytomo/random.hpp"
#include "fuzzytomo/simulation.hpp"

namespace fuzzytomo::cli {

namespace {

// Third word of the theory-sample seed; keeps it apart from run seeds.
constexpr std::uint64_t kTheoryStream = 0x7468656f7279ULL;

RunRecord run_once(const Protocol& protocol, const PureState& truth, const SolverOptions& base,
                   int index, std::uint64_t seed) {
  const auto counts = sample_counts(protocol, truth, seed);
  SolverOptions opts = base;
  opts.init_seed = mix64(seed);
  const auto result = ml_reconstruct(protocol, counts, opts, &truth);
  RunRecord r;
  r.index = index;
  r.seed = seed;
  r.fidelity = *result.fidelity_vs_reference;
  r.loss = std::max(0.0, 1.0 - r.fidelity);
  r.z = fidelity_nines(r.loss);
  r.iterations = result.iterations;
  r.converged = result.converged;
  r.residual = result.residual;
  return r;
}

std::vector<RunRecord> run_pair(const Protocol& protocol, const ExperimentConfig& cfg) {
  std::vector<RunRecord> runs(static_cast<std::size_t>(cfg.num_experiments));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < cfg.num_experiments; i = next++) {
      try {
        runs[static_cast<std::size_t>(i)] =
            run_once(protocol, cfg.state, cfg.solver, i,
                     run_seed(cfg.master_seed, protocol.variant(), protocol.efficiency(),
                              static_cast<std::uint64_t>(i)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = cfg.num_experiments;
      }
    }
  };
  {
    const int k = std::max(1, std::min(cfg.workers, cfg.num_experiments));
    std::vector<std::jthread> pool;
    for (int w = 1; w < k; ++w) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return runs;
}

Histogram make_histogram(const std::vector<double>& z, const std::vector<double>& theory) {
  Histogram h;
  const double top = *std::max_element(z.begin(), z.end()) + 0.5;
  const auto bins = static_cast<std::size_t>(std::ceil(top / kHistogramBinWidth));
  for (std::size_t i = 0; i <= bins; ++i) h.edges.push_back(static_cast<double>(i) * kHistogramBinWidth);
  h.empirical.assign(bins, 0);
  std::vector<std::int64_t> th(bins, 0);
  auto bin_of = [&](double v) -> std::optional<std::size_t> {
    if (!(v >= 0.0)) return std::nullopt;
    const auto b = static_cast<std::size_t>(v / kHistogramBinWidth);
    return b < bins ? std::optional(b) : std::nullopt;
  };
  for (double v : z) {
    if (auto b = bin_of(v)) ++h.empirical[*b];
  }
  for (double v : theory) {
    if (auto b = bin_of(v)) ++th[*b];
  }
  for (auto c : th) {
    h.theoretical_fraction.push_back(static_cast<double>(c) / static_cast<double>(theory.size()));
  }
  return h;
}

PairReport analyze_pair(const ExperimentConfig& cfg, ProtocolVariant variant, double eta) {
  const auto set = projector_set_by_name(cfg.m1_set);
  const int n_photons = cfg.state.num_photons();
  const Protocol protocol = build_protocol(variant, set, n_photons, cfg.sample_size, eta);
  const auto analysis = analyze(protocol, cfg.state);

  PairReport rep;
  rep.variant = variant;
  rep.efficiency = eta;
  rep.fingerprint = protocol_fingerprint(protocol);
  rep.theory_mean_loss = analysis.loss.mean_loss;
  rep.normalized_information = analysis.normalized_information;
  rep.closed_form_information = closed_form_information(variant, n_photons, eta);
  rep.spectrum = analysis.spectrum;
  if (cfg.num_experiments == 0) return rep;

  rep.runs = run_pair(protocol, cfg);
  std::vector<double> losses;
  std::vector<double> zs;
  for (const auto& r : rep.runs) {
    if (!r.converged) {
      ++rep.non_converged;
      continue;
    }
    losses.push_back(r.loss);
    zs.push_back(r.z);
  }
  if (!losses.empty()) {
    const double k = static_cast<double>(losses.size());
    const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / k;
    double ss = 0.0;
    for (double l : losses) ss += (l - mean) * (l - mean);
    rep.empirical_mean_loss = mean;
    rep.empirical_standard_error = losses.size() > 1 ? std::sqrt(ss / (k - 1.0) / k) : 0.0;
  }

  const auto theory = sample_loss_distribution(
      analysis.loss.coefficients, cfg.theory_samples,
      derive_seed({cfg.master_seed, static_cast<std::uint64_t>(variant),
                   std::bit_cast<std::uint64_t>(eta), kTheoryStream}));
  std::vector<double> finite_z;
  for (double z : zs) {
    if (std::isfinite(z)) finite_z.push_back(z);
  }
  if (!finite_z.empty()) rep.histogram = make_histogram(finite_z, theory);
  rep.chi_squared_bins = std::min(cfg.chi2_bins, static_cast<int>(zs.size() / 5));
  if (rep.chi_squared_bins >= 2) {
    rep.chi_squared = chi_squared_gof(zs, theory, rep.chi_squared_bins);
  } else {
    rep.chi_squared_bins = 0;
  }
  return rep;
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string pair_label(ProtocolVariant variant, double efficiency) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_eta%.6g", std::string(to_string(variant)).c_str(), efficiency);
  return buf;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report;
  report.config = config;
  for (auto variant : config.variants) {
    for (double eta : config.efficiencies) {
      report.pairs.push_back(analyze_pair(config, variant, eta));
      const auto& p = report.pairs.back();
      if (config.num_experiments > 0 &&
          static_cast<double>(p.non_converged) >
              kMaxNonConvergedFraction * static_cast<double>(config.num_experiments)) {
        report.convergence_failure = true;
      }
    }
  }
  return report;
}

Json to_json(const ExperimentReport& report, bool with_timestamp) {
  const bool simulated = report.config.num_experiments > 0;
  Json pairs = Json::array();
  for (const auto& p : report.pairs) {
    Json entry{{"variant", std::string(to_string(p.variant))},
               {"eta", p.efficiency},
               {"protocol_fingerprint", p.fingerprint},
               {"theory",
                {{"mean_loss", p.theory_mean_loss},
                 {"normalized_information", p.normalized_information},
                 {"closed_form_information", p.closed_form_information},
                 {"spectrum", p.spectrum}}}};
    if (simulated) {
      Json sim{{"runs", p.runs.size()},
               {"non_converged", p.non_converged},
               {"mean_loss", optional_json(p.empirical_mean_loss)},
               {"standard_error", optional_json(p.empirical_standard_error)},
               {"histogram",
                {{"edges", p.histogram.edges},
                 {"counts", p.histogram.empirical},
                 {"theoretical_fraction", p.histogram.theoretical_fraction}}}};
      if (p.chi_squared) {
        sim["chi_squared"] = {{"statistic", p.chi_squared->statistic},
                              {"degrees_of_freedom", p.chi_squared->degrees_of_freedom},
                              {"p_value", p.chi_squared->p_value},
                              {"bins", p.chi_squared_bins}};
      } else {
        sim["chi_squared"] = nullptr;
      }
      entry["simulation"] = std::move(sim);
    }
    pairs.push_back(std::move(entry));
  }

  // Coincidence over fuzzy theoretical loss, per eta present for both.
  Json ratios = Json::array();
  for (const auto& c : report.pairs) {
    if (c.variant != ProtocolVariant::Coincidence) continue;
    for (const auto& f : report.pairs) {
      if (f.variant == ProtocolVariant::Fuzzy && f.efficiency == c.efficiency) {
        ratios.push_back({{"eta", c.efficiency},
                          {"coincidence_over_fuzzy", c.theory_mean_loss / f.theory_mean_loss}});
      }
    }
  }

  Json metadata{{"config", to_json(report.config)},
                {"seed_derivation", "derive_seed(master_seed, variant, bits(eta), run)"},
                {"version", "0.1.0"}};
  if (with_timestamp) metadata["timestamp"] = utc_timestamp();
  return Json{{"metadata", std::move(metadata)},
              {"pairs", std::move(pairs)},
              {"loss_ratios", std::move(ratios)},
              {"convergence_failure", report.convergence_failure}};
}

void write_report(const ExperimentReport& report) {
  namespace fs = std::filesystem;
  const fs::path dir(report.config.output_dir);
  fs::create_directories(dir);
  write_json_file((dir / "report.json").string(), to_json(report));
  if (report.config.num_experiments == 0) return;
  for (const auto& p : report.pairs) {
    const auto label = pair_label(p.variant, p.efficiency);
    {
      std::ofstream out(dir / (label + "_runs.csv"), std::ios::binary);
      if (!out) throw std::runtime_error("cannot write runs CSV for " + label);
      out << "index,seed,fidelity,loss,z,iterations,converged,residual\n";
      for (const auto& r : p.runs) {
        out << r.index << ',' << r.seed << ',' << format_decimal(r.fidelity) << ','
            << format_decimal(r.loss) << ',' << format_decimal(r.z) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0) << ',' << format_decimal(r.residual) << '\n';
      }
    }
    {
      std::ofstream out(dir / (label + "_histogram.csv"), std::ios::binary);
      if (!out) throw std::runtime_error("cannot write histogram CSV for " + label);
      out << "lower,upper,count,theoretical_fraction\n";
      const auto& h = p.histogram;
      for (std::size_t i = 0; i < h.empirical.size(); ++i) {
        out << format_decimal(h.edges[i]) << ',' << format_decimal(h.edges[i + 1]) << ','
            << h.empirical[i] << ',' << format_decimal(h.theoretical_fraction[i]) << '\n';
      }
    }
  }
}

}  // namespace fuzzytomo::cli
