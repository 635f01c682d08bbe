#pragma once

#include "clickstat/core_stats.hpp"

namespace clickstat {

/// |alpha| of a coherent state.  Click statistics depend on |alpha|^2 only,
/// so the phase is not represented.
class CoherentAmplitude {
 public:
  explicit CoherentAmplitude(double magnitude);

  double magnitude() const noexcept { return magnitude_; }
  double mean_photons() const noexcept { return magnitude_ * magnitude_; }

 private:
  double magnitude_;
};

/// Large-N limits of the branch odds and the two measures.
struct QuantumAsymptotics {
  double c_inf = 0.0;   // |alpha|^2 / 2
  double qb_inf = 0.0;  // -C_inf / (C_inf + 1)
  double cp_inf = 0.0;  // qb_inf^2
};

/// |alpha|^2 / N above which exp(|alpha|^2 / N) is treated as overflowing.
inline constexpr double kQuantumOverflowExponent = 700.0;

/// Per-detector c = 1 - exp(-|alpha|^2/N) and d = exp(-|alpha|^2/N).
/// c + d == 1 holds exactly in floating point; the smaller of the two is
/// evaluated directly.
ClickProbabilities click_probabilities(CoherentAmplitude alpha, const MultiplexerConfig& config);

/// Product of two independent Binomial(N/2, c) branch marginals.
JointClickDistribution bare_joint(CoherentAmplitude alpha, const MultiplexerConfig& config);

/// C = (N/2)(exp(|alpha|^2 / N) - 1).  Throws Overflow for |alpha|^2/N > 700.
double branch_odds(CoherentAmplitude alpha, const MultiplexerConfig& config);

/// Pr(k1, k2) = C^(k1 + k2) / (C + 1)^2.  Propagates Overflow.
PostSelectedDistribution post_selected_joint(CoherentAmplitude alpha, const MultiplexerConfig& config);

/// Post-selected click share C/(C+1), finite for every input (-> 1 when C
/// overflows).
BranchShare quantum_branch_share(CoherentAmplitude alpha, const MultiplexerConfig& config);

double qb_closed_form(CoherentAmplitude alpha, const MultiplexerConfig& config);
double cp_closed_form(CoherentAmplitude alpha, const MultiplexerConfig& config);

QuantumAsymptotics asymptotics(CoherentAmplitude alpha);

}  // namespace clickstat
