#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

#include "clickstat/classical_model.hpp"
#include "clickstat/core_stats.hpp"
#include "clickstat/intensity_distribution.hpp"
#include "clickstat/quantum_model.hpp"
#include "clickstat/random.hpp"

namespace clickstat::mc {

struct QuantumSource {
  CoherentAmplitude alpha;
};

/// A fresh intensity is drawn from `source` for every trial and split
/// evenly over the N detectors.
struct ClassicalSource {
  DetectorModel detector;
  IntensityDistribution source;
};

using ModelSpec = std::variant<QuantumSource, ClassicalSource>;

enum class Sampling {
  kBinomialCounts,  // one binomial draw per branch
  kPerDetector,     // one Bernoulli draw per detector
};

struct TrialConfig {
  ModelSpec model;
  MultiplexerConfig multiplexer;
  std::int64_t trials = 1;
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::kBinomialCounts;

  void validate() const;
};

struct BranchClicks {
  std::int64_t k1 = 0;
  std::int64_t k2 = 0;
};

/// One raw trial: per-branch click counts before post-selection.
BranchClicks simulate_trial(const TrialConfig& config, CounterRng& stream);

/// Raw-trial count and post-selected counts indexed 2 * k1 + k2.
struct TrialTally {
  std::int64_t trials = 0;
  std::array<std::int64_t, 4> accepted{};

  std::int64_t accepted_total() const noexcept {
    return accepted[0] + accepted[1] + accepted[2] + accepted[3];
  }
  TrialTally& operator+=(const TrialTally& other) noexcept;
  friend bool operator==(const TrialTally&, const TrialTally&) = default;
};

/// Chunk c uses CounterRng(seed, c); results depend only on (config, seed).
inline constexpr std::int64_t kTrialsPerChunk = 4096;

/// Reference implementation: chunks processed in order on the calling
/// thread.
TrialTally tally_trials_serial(const TrialConfig& config);

/// OpenMP over chunks.  Bit-identical to the serial tally for any thread
/// count; `threads <= 0` uses the OpenMP default.
TrialTally tally_trials_parallel(const TrialConfig& config, int threads = 0);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

inline constexpr int kBootstrapResamples = 200;

struct EstimateReport {
  std::int64_t raw_trials = 0;
  std::int64_t accepted_trials = 0;
  PostSelectedDistribution table{{1.0, 0.0, 0.0, 0.0}};
  std::array<double, 4> table_std_error{};
  /// Empty when every accepted trial has the same degenerate total (all
  /// (0,0), or all (1,1) at N = 2).
  std::optional<Estimate> qb_estimate;
  Estimate cp_estimate;

  double acceptance_rate() const noexcept {
    return raw_trials == 0 ? 0.0 : static_cast<double>(accepted_trials) / static_cast<double>(raw_trials);
  }
  /// Throws DegenerateMean when no Q_B estimate exists.
  const Estimate& qb() const;
};

/// Runs the trials, rejects any with k1 >= 2 or k2 >= 2 and measures the
/// empirical table.  CP error is binomial; the Q_B error is a bootstrap over
/// accepted trials.  Throws ZeroAcceptance if nothing is accepted.
EstimateReport estimate(const TrialConfig& config, int threads = 0);

/// Same as estimate() on an existing tally.
EstimateReport estimate_from_tally(const TrialConfig& config, const TrialTally& tally);

/// Closed-form prediction that a Monte Carlo run is checked against.
struct ClosedForm {
  PostSelectedDistribution table{{1.0, 0.0, 0.0, 0.0}};
  double qb = 0.0;
  double cp = 0.0;
};

/// Quantum and delta-source classical models use the product form; other
/// classical sources use the intensity mixture.
ClosedForm closed_form(const ModelSpec& model, const MultiplexerConfig& config);

/// |estimate - reference| / std_error, with 0 for an exact match and +inf
/// for a mismatch at zero standard error.
double sigma_distance(const Estimate& estimate, double reference);

struct OracleCheck {
  double qb_distance = 0.0;
  double cp_distance = 0.0;

  double worst() const noexcept { return qb_distance > cp_distance ? qb_distance : cp_distance; }
  bool within(double sigmas) const noexcept { return worst() <= sigmas; }
};

/// A missing Q_B estimate counts as agreement only when the closed-form
/// table is the same point mass as the empirical one.
OracleCheck compare(const EstimateReport& report, const ClosedForm& reference);

}  // namespace clickstat::mc
