#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "clickstat/core_stats.hpp"
#include "clickstat/intensity_distribution.hpp"

namespace clickstat {

/// Threshold on/off detector with a tanh response above threshold.
class DetectorModel {
 public:
  /// threshold > 0, ionization in [0, 1).
  explicit DetectorModel(double ionization, double threshold = 1.0);

  double threshold() const noexcept { return threshold_; }
  double ionization() const noexcept { return ionization_; }
  /// f(beta) = beta / (1 - beta).
  double stochastic_factor() const noexcept { return factor_; }

 private:
  double threshold_;
  double ionization_;
  double factor_;
};

/// tanh((I - I_th)/I_th * f(beta)) for I > I_th and exactly 0 otherwise.
double click_probability(const DetectorModel& det, double intensity);

/// Both probabilities of one detector; the no-click probability is
/// 2 / (1 + exp(2y)) so it keeps relative precision as the click
/// probability approaches 1.
ClickProbabilities detector_response(const DetectorModel& det, double intensity);

/// C = (N/2) p/(1 - p) at per-detector intensity I/N, evaluated as
/// (N/2) expm1(2y)/2.  Zero whenever I/N <= I_th; OddsDiverged if the odds
/// overflow a double.
double branch_odds_classical(const DetectorModel& det, double intensity, const MultiplexerConfig& config);

/// Bare table for a fixed input intensity: two independent Binomial(N/2, p).
JointClickDistribution classical_bare_joint(const DetectorModel& det, double intensity,
                                            const MultiplexerConfig& config);

/// Product-form post-selected table with the classical branch odds.
/// Propagates OddsDiverged.
PostSelectedDistribution classical_post_selected(const DetectorModel& det, double intensity,
                                                 const MultiplexerConfig& config);

/// C/(C+1) written as b p / (b p + q); finite for every intensity.
BranchShare classical_branch_share(const DetectorModel& det, double intensity,
                                   const MultiplexerConfig& config);

/// Closed-form Q_B for a fixed intensity; exactly 0 once I/N <= I_th.
double classical_qb(const DetectorModel& det, double intensity, const MultiplexerConfig& config);

/// Integral of g(t) p(I) dI over I > lower, where t = I - lower is passed to
/// the integrand.  Adaptive Gauss-Kronrod on each smooth piece of the
/// density; QuadratureFailure if a piece misses relative tolerance 1e-8.
double expect_above(const IntensityDistribution& src, double lower,
                    const std::function<double(double)>& integrand);

/// Pr(on | N): the click probability of one detector averaged over p(I).
double averaged_click_probability(const DetectorModel& det, const IntensityDistribution& src,
                                  const MultiplexerConfig& config);

/// (N Pr(on|N) / (N Pr(on|N) + 2 Pr(off|N)))^2 with Pr(off|N) = 1 - Pr(on|N).
double classical_cp(const DetectorModel& det, const IntensityDistribution& src,
                    const MultiplexerConfig& config);

struct AppendixRow {
  MultiplexerConfig config;
  double pr_on = 0.0;
  double n_pr_on = 0.0;
  double cp = 0.0;
};

/// Pr(on|N), N Pr(on|N) and CP for each degree.  Degrees must be strictly
/// increasing powers of two.
std::vector<AppendixRow> appendix_a_limit(const DetectorModel& det, const IntensityDistribution& src,
                                          std::span<const std::int64_t> degrees);

/// Post-selected table when a fresh intensity is drawn per trial and shared
/// by all N detectors: Pr(k1, k2) proportional to E_I[P(k1|I) P(k2|I)].
/// For delta sources this is the product form; in general it is a mixture.
/// Throws ZeroAcceptance if the retained mass vanishes.
PostSelectedDistribution classical_mixture_post_selected(const DetectorModel& det,
                                                         const IntensityDistribution& src,
                                                         const MultiplexerConfig& config);

}  // namespace clickstat
