#include "clickstat/quantum_model.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "clickstat/error.hpp"

namespace clickstat {
namespace {

double exponent(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  return alpha.mean_photons() / static_cast<double>(config.degree());
}

}  // namespace

CoherentAmplitude::CoherentAmplitude(double magnitude) : magnitude_(magnitude) {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw ValidationError(fmt::format("coherent amplitude must be finite and >= 0, got {}", magnitude));
  }
}

ClickProbabilities click_probabilities(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  const double x = exponent(alpha, config);
  // Evaluate whichever of c, d is below 1/2 and take the other as its
  // complement; the rounding error of 1 - v is then at most 2^-54, so
  // c + d rounds back to exactly 1.
  if (x <= std::log(2.0)) {
    const double c = -std::expm1(-x);
    return {c, 1.0 - c};
  }
  const double d = std::exp(-x);
  return {1.0 - d, d};
}

JointClickDistribution bare_joint(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  const ClickProbabilities cd = click_probabilities(alpha, config);
  const std::vector<double> branch = binomial_pmf(config.branch_size(), cd.click, cd.no_click);
  return JointClickDistribution::from_marginals(config, branch, branch);
}

double branch_odds(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  const double x = exponent(alpha, config);
  if (x > kQuantumOverflowExponent) {
    throw Overflow(fmt::format("|alpha|^2/N = {:.6g} exceeds {}; use asymptotics or a deeper multiplexer",
                               x, kQuantumOverflowExponent));
  }
  return static_cast<double>(config.branch_size()) * std::expm1(x);
}

BranchShare quantum_branch_share(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  const double x = exponent(alpha, config);
  if (x > kQuantumOverflowExponent) return {1.0, 0.0};
  return BranchShare::from_odds(static_cast<double>(config.branch_size()) * std::expm1(x));
}

PostSelectedDistribution post_selected_joint(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  return PostSelectedDistribution::product_form(BranchShare::from_odds(branch_odds(alpha, config)));
}

double qb_closed_form(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  return product_form::sub_binomiality(quantum_branch_share(alpha, config), config);
}

double cp_closed_form(CoherentAmplitude alpha, const MultiplexerConfig& config) {
  return product_form::coincident_probability(quantum_branch_share(alpha, config));
}

QuantumAsymptotics asymptotics(CoherentAmplitude alpha) {
  const double c_inf = alpha.mean_photons() / 2.0;
  const double share = c_inf / (c_inf + 1.0);
  return {c_inf, share == 0.0 ? 0.0 : -share, share * share};
}

}  // namespace clickstat
