#include "clickstat/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <fmt/format.h>
#include <omp.h>

#include "clickstat/error.hpp"

namespace clickstat::mc {
namespace {

// Stream id reserved for the bootstrap so it never collides with a chunk.
constexpr std::uint64_t kBootstrapStream = std::numeric_limits<std::uint64_t>::max();

// Per-run constants hoisted out of the trial loop.
class TrialKernel {
 public:
  explicit TrialKernel(const TrialConfig& config)
      : config_(config), branch_(config.multiplexer.branch_size()) {
    if (const auto* q = std::get_if<QuantumSource>(&config.model)) {
      fixed_ = click_probabilities(q->alpha, config.multiplexer);
    } else {
      const auto& c = std::get<ClassicalSource>(config.model);
      classical_ = &c;
      if (const auto* d = std::get_if<IntensityDistribution::Delta>(&c.source.kind())) {
        fixed_ = detector_response(c.detector, d->intensity / degree());
      }
    }
    if (fixed_) sampler_.emplace(branch_, fixed_->click, fixed_->no_click);
  }

  BranchClicks operator()(CounterRng& rng) const {
    if (sampler_ && config_.sampling == Sampling::kBinomialCounts) return {(*sampler_)(rng), (*sampler_)(rng)};
    ClickProbabilities pq;
    if (fixed_) {
      pq = *fixed_;
    } else {
      const double intensity = classical_->source.quantile(rng.uniform());
      pq = detector_response(classical_->detector, intensity / degree());
    }
    if (config_.sampling == Sampling::kPerDetector) {
      return {sample_bernoulli_sum(branch_, pq.click, pq.no_click, rng),
              sample_bernoulli_sum(branch_, pq.click, pq.no_click, rng)};
    }
    return {sample_binomial(branch_, pq.click, pq.no_click, rng),
            sample_binomial(branch_, pq.click, pq.no_click, rng)};
  }

  TrialTally run_chunk(std::int64_t chunk) const {
    const std::int64_t first = chunk * kTrialsPerChunk;
    const std::int64_t count = std::min(kTrialsPerChunk, config_.trials - first);
    CounterRng rng(config_.seed, static_cast<std::uint64_t>(chunk));
    TrialTally tally;
    tally.trials = count;
    for (std::int64_t i = 0; i < count; ++i) {
      const BranchClicks k = (*this)(rng);
      if (k.k1 <= 1 && k.k2 <= 1) ++tally.accepted[static_cast<std::size_t>(2 * k.k1 + k.k2)];
    }
    return tally;
  }

  std::int64_t chunks() const { return (config_.trials + kTrialsPerChunk - 1) / kTrialsPerChunk; }

 private:
  double degree() const { return static_cast<double>(config_.multiplexer.degree()); }

  const TrialConfig& config_;
  std::int64_t branch_;
  std::optional<ClickProbabilities> fixed_;
  std::optional<BinomialSampler> sampler_;
  const ClassicalSource* classical_ = nullptr;
};

std::optional<double> table_qb(const std::array<std::int64_t, 4>& counts, std::int64_t total,
                               const MultiplexerConfig& config) {
  const double n = static_cast<double>(total);
  const PostSelectedDistribution table({counts[0] / n, counts[1] / n, counts[2] / n, counts[3] / n});
  try {
    return sub_binomiality(table, config);
  } catch (const DegenerateMean&) {
    return std::nullopt;
  }
}

// Resampling n accepted trials with replacement is a multinomial draw over
// the four cells.
Estimate bootstrap_qb(double point, const TrialTally& tally, const TrialConfig& config) {
  CounterRng rng(config.seed, kBootstrapStream);
  const std::int64_t n = tally.accepted_total();
  const double dn = static_cast<double>(n);
  std::vector<double> samples;
  samples.reserve(kBootstrapResamples);
  for (int r = 0; r < kBootstrapResamples; ++r) {
    std::array<std::int64_t, 4> draw{};
    std::int64_t left = n;
    double mass_left = 1.0;
    for (std::size_t cell = 0; cell < 3 && left > 0; ++cell) {
      const double p = static_cast<double>(tally.accepted[cell]) / dn;
      const double cond = mass_left > 0.0 ? std::min(1.0, p / mass_left) : 0.0;
      std::binomial_distribution<std::int64_t> pick(left, cond);
      draw[cell] = pick(rng);
      left -= draw[cell];
      mass_left -= p;
    }
    draw[3] = left;
    if (const auto qb = table_qb(draw, n, config.multiplexer)) samples.push_back(*qb);
  }
  if (samples.size() < 2) return {point, 0.0};
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (double s : samples) ss += (s - mean) * (s - mean);
  return {point, std::sqrt(ss / static_cast<double>(samples.size() - 1))};
}

}  // namespace

void TrialConfig::validate() const {
  if (trials < 1) throw ValidationError(fmt::format("trial count must be >= 1, got {}", trials));
}

TrialTally& TrialTally::operator+=(const TrialTally& other) noexcept {
  trials += other.trials;
  for (std::size_t i = 0; i < accepted.size(); ++i) accepted[i] += other.accepted[i];
  return *this;
}

BranchClicks simulate_trial(const TrialConfig& config, CounterRng& stream) {
  return TrialKernel(config)(stream);
}

TrialTally tally_trials_serial(const TrialConfig& config) {
  config.validate();
  const TrialKernel kernel(config);
  TrialTally total;
  for (std::int64_t c = 0; c < kernel.chunks(); ++c) total += kernel.run_chunk(c);
  return total;
}

TrialTally tally_trials_parallel(const TrialConfig& config, int threads) {
  config.validate();
  const TrialKernel kernel(config);
  const std::int64_t chunks = kernel.chunks();
  std::vector<TrialTally> partial(static_cast<std::size_t>(chunks));
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (std::int64_t c = 0; c < chunks; ++c) partial[static_cast<std::size_t>(c)] = kernel.run_chunk(c);
  TrialTally total;
  for (const TrialTally& t : partial) total += t;
  return total;
}

const Estimate& EstimateReport::qb() const {
  if (!qb_estimate) {
    throw DegenerateMean("all accepted trials share a degenerate click total; Q_B is undefined");
  }
  return *qb_estimate;
}

EstimateReport estimate(const TrialConfig& config, int threads) {
  return estimate_from_tally(config, tally_trials_parallel(config, threads));
}

EstimateReport estimate_from_tally(const TrialConfig& config, const TrialTally& tally) {
  const std::int64_t n = tally.accepted_total();
  if (n == 0) {
    throw ZeroAcceptance(fmt::format("no trial survived post-selection (acceptance rate 0/{})", tally.trials));
  }
  const double dn = static_cast<double>(n);
  EstimateReport report;
  report.raw_trials = tally.trials;
  report.accepted_trials = n;
  std::array<double, 4> p{};
  for (std::size_t i = 0; i < 4; ++i) {
    p[i] = static_cast<double>(tally.accepted[i]) / dn;
    report.table_std_error[i] = std::sqrt(p[i] * (1.0 - p[i]) / dn);
  }
  report.table = PostSelectedDistribution(p);
  report.cp_estimate = {coincident_probability(report.table), report.table_std_error[3]};
  if (const auto qb = table_qb(tally.accepted, n, config.multiplexer)) {
    report.qb_estimate = bootstrap_qb(*qb, tally, config);
  }
  return report;
}

ClosedForm closed_form(const ModelSpec& model, const MultiplexerConfig& config) {
  if (const auto* q = std::get_if<QuantumSource>(&model)) {
    const BranchShare share = quantum_branch_share(q->alpha, config);
    return {PostSelectedDistribution::product_form(share), product_form::sub_binomiality(share, config),
            product_form::coincident_probability(share)};
  }
  const auto& c = std::get<ClassicalSource>(model);
  const PostSelectedDistribution table = classical_mixture_post_selected(c.detector, c.source, config);
  double qb = 0.0;
  if (const auto* d = std::get_if<IntensityDistribution::Delta>(&c.source.kind())) {
    qb = classical_qb(c.detector, d->intensity, config);
  } else {
    try {
      qb = sub_binomiality(table, config);
    } catch (const DegenerateMean&) {
      qb = 0.0;
    }
  }
  return {table, qb, coincident_probability(table)};
}

double sigma_distance(const Estimate& estimate, double reference) {
  const double diff = std::abs(estimate.value - reference);
  if (diff == 0.0) return 0.0;
  if (estimate.std_error == 0.0) return std::numeric_limits<double>::infinity();
  return diff / estimate.std_error;
}

OracleCheck compare(const EstimateReport& report, const ClosedForm& reference) {
  OracleCheck check;
  check.cp_distance = sigma_distance(report.cp_estimate, reference.cp);
  if (report.qb_estimate) {
    check.qb_distance = sigma_distance(*report.qb_estimate, reference.qb);
  } else {
    bool same_point_mass = false;
    for (std::size_t i = 0; i < 4; ++i) {
      if (report.table.table()[i] == 1.0 && reference.table.table()[i] == 1.0) same_point_mass = true;
    }
    check.qb_distance = same_point_mass ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return check;
}

}  // namespace clickstat::mc
