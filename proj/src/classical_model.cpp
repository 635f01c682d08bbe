#include "clickstat/classical_model.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "clickstat/error.hpp"

namespace clickstat {
namespace {

constexpr double kQuadratureRelTol = 1e-8;
// Requested from the integrator; tighter than the acceptance tolerance above.
constexpr double kQuadratureTarget = 1e-11;
constexpr unsigned kQuadratureMaxDepth = 20;
// exp(-40) relative tail mass is dropped for exponential sources.
constexpr double kExponentialTailMeans = 40.0;

void require_intensity(double intensity) {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw ValidationError(fmt::format("intensity must be finite and >= 0, got {}", intensity));
  }
}

double per_detector(double intensity, const MultiplexerConfig& config) {
  // Exact: N is a power of two.
  return intensity / static_cast<double>(config.degree());
}

template <class F>
double integrate(const F& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, kQuadratureMaxDepth, kQuadratureTarget, &error, &l1);
  if (!std::isfinite(value) || !(error <= kQuadratureRelTol * std::abs(value) || error == 0.0)) {
    throw QuadratureFailure(fmt::format("quadrature on [{:.6g}, {:.6g}] reached error {:.3g} for value {:.6g}",
                                        a, b, error, value));
  }
  return value;
}

// Click / no-click probabilities of a detector that receives `offset`
// intensity above its threshold, with `scale` = N * I_th.
ClickProbabilities response_above(const DetectorModel& det, double offset, double scale) {
  if (!(offset > 0.0)) return {0.0, 1.0};
  const double y = offset / scale * det.stochastic_factor();
  return {std::tanh(y), 2.0 / (1.0 + std::exp(2.0 * y))};
}

}  // namespace

DetectorModel::DetectorModel(double ionization, double threshold)
    : threshold_(threshold), ionization_(ionization), factor_(0.0) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw ValidationError(fmt::format("detector threshold must be finite and > 0, got {}", threshold));
  }
  if (!(ionization >= 0.0 && ionization < 1.0)) {
    throw ValidationError(fmt::format("ionization factor must be in [0, 1), got {}", ionization));
  }
  factor_ = ionization / (1.0 - ionization);
}

double click_probability(const DetectorModel& det, double intensity) {
  return detector_response(det, intensity).click;
}

ClickProbabilities detector_response(const DetectorModel& det, double intensity) {
  require_intensity(intensity);
  if (intensity <= det.threshold()) return {0.0, 1.0};
  const double y = (intensity - det.threshold()) / det.threshold() * det.stochastic_factor();
  return {std::tanh(y), 2.0 / (1.0 + std::exp(2.0 * y))};
}

double branch_odds_classical(const DetectorModel& det, double intensity, const MultiplexerConfig& config) {
  require_intensity(intensity);
  const double share = per_detector(intensity, config);
  if (share <= det.threshold()) return 0.0;
  const double y = (share - det.threshold()) / det.threshold() * det.stochastic_factor();
  // tanh(y) / (1 - tanh(y)) = (exp(2y) - 1) / 2.
  const double odds = static_cast<double>(config.branch_size()) * (std::expm1(2.0 * y) / 2.0);
  if (!std::isfinite(odds)) {
    throw OddsDiverged(fmt::format("click odds overflow at per-detector intensity {:.6g} I_th",
                                   share / det.threshold()));
  }
  return odds;
}

JointClickDistribution classical_bare_joint(const DetectorModel& det, double intensity,
                                            const MultiplexerConfig& config) {
  const ClickProbabilities pq = detector_response(det, per_detector(intensity, config));
  const std::vector<double> branch = binomial_pmf(config.branch_size(), pq.click, pq.no_click);
  return JointClickDistribution::from_marginals(config, branch, branch);
}

PostSelectedDistribution classical_post_selected(const DetectorModel& det, double intensity,
                                                 const MultiplexerConfig& config) {
  return PostSelectedDistribution::product_form(
      BranchShare::from_odds(branch_odds_classical(det, intensity, config)));
}

BranchShare classical_branch_share(const DetectorModel& det, double intensity,
                                   const MultiplexerConfig& config) {
  const ClickProbabilities pq = detector_response(det, per_detector(intensity, config));
  return BranchShare::from_detector(config.branch_size(), pq.click, pq.no_click);
}

double classical_qb(const DetectorModel& det, double intensity, const MultiplexerConfig& config) {
  return product_form::sub_binomiality(classical_branch_share(det, intensity, config), config);
}

double expect_above(const IntensityDistribution& src, double lower,
                    const std::function<double(double)>& integrand) {
  if (!(lower >= 0.0)) throw ValidationError("expect_above: lower limit must be >= 0");
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, IntensityDistribution::Delta>) {
          return k.intensity > lower ? integrand(k.intensity - lower) : 0.0;
        } else if constexpr (std::is_same_v<T, IntensityDistribution::Uniform>) {
          const double from = std::max(k.lower, lower);
          if (from >= k.upper) return 0.0;
          const double density = 1.0 / (k.upper - k.lower);
          return density * integrate(integrand, from - lower, k.upper - lower);
        } else if constexpr (std::is_same_v<T, IntensityDistribution::Exponential>) {
          // Factor out the mass above `lower` so the integral stays O(1)
          // however deep in the tail the threshold sits.
          const double mu = k.mean;
          const double above = std::exp(-lower / mu);
          if (above == 0.0) return 0.0;
          const auto weighted = [&](double t) { return integrand(t) * std::exp(-t / mu) / mu; };
          return above * integrate(weighted, 0.0, kExponentialTailMeans * mu);
        } else {
          double total = 0.0;
          for (std::size_t i = 1; i < k.intensity.size(); ++i) {
            const double x0 = k.intensity[i - 1];
            const double x1 = k.intensity[i];
            if (x1 <= lower) continue;
            const double f0 = k.density[i - 1];
            const double slope = (k.density[i] - f0) / (x1 - x0);
            if (f0 == 0.0 && slope == 0.0) continue;
            const auto weighted = [&](double t) { return integrand(t) * (f0 + slope * (t + lower - x0)); };
            total += integrate(weighted, std::max(x0, lower) - lower, x1 - lower);
          }
          return total;
        }
      },
      src.kind());
}

double averaged_click_probability(const DetectorModel& det, const IntensityDistribution& src,
                                  const MultiplexerConfig& config) {
  if (const auto* d = std::get_if<IntensityDistribution::Delta>(&src.kind())) {
    return click_probability(det, per_detector(d->intensity, config));
  }
  const double scale = static_cast<double>(config.degree()) * det.threshold();
  return expect_above(src, scale, [&](double t) { return response_above(det, t, scale).click; });
}

double classical_cp(const DetectorModel& det, const IntensityDistribution& src,
                    const MultiplexerConfig& config) {
  ClickProbabilities on_off;
  if (const auto* d = std::get_if<IntensityDistribution::Delta>(&src.kind())) {
    on_off = detector_response(det, per_detector(d->intensity, config));
  } else {
    const double on = averaged_click_probability(det, src, config);
    on_off = {on, 1.0 - on};
  }
  return product_form::coincident_probability(
      BranchShare::from_detector(config.branch_size(), on_off.click, on_off.no_click));
}

std::vector<AppendixRow> appendix_a_limit(const DetectorModel& det, const IntensityDistribution& src,
                                          std::span<const std::int64_t> degrees) {
  if (degrees.empty()) throw ValidationError("appendix_a_limit: degree list is empty");
  std::vector<AppendixRow> rows;
  rows.reserve(degrees.size());
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (i > 0 && degrees[i] <= degrees[i - 1]) {
      throw ValidationError("appendix_a_limit: degrees must be strictly increasing");
    }
    const MultiplexerConfig config = MultiplexerConfig::from_degree(degrees[i]);
    const double on = averaged_click_probability(det, src, config);
    rows.push_back({config, on, static_cast<double>(config.degree()) * on, classical_cp(det, src, config)});
  }
  return rows;
}

PostSelectedDistribution classical_mixture_post_selected(const DetectorModel& det,
                                                         const IntensityDistribution& src,
                                                         const MultiplexerConfig& config) {
  if (const auto* d = std::get_if<IntensityDistribution::Delta>(&src.kind())) {
    return PostSelectedDistribution::product_form(classical_branch_share(det, d->intensity, config));
  }
  const double scale = static_cast<double>(config.degree()) * det.threshold();
  const auto b = static_cast<double>(config.branch_size());
  const double n = 2.0 * b;
  const auto moment = [&](int clicks) {
    // E[P(k1|I) P(k2|I)] above threshold for k1 + k2 = clicks, k_i <= 1.
    return expect_above(src, scale, [&, clicks](double t) {
      const ClickProbabilities pq = response_above(det, t, scale);
      const double ones = std::pow(b * pq.click, clicks);
      return ones * std::pow(pq.no_click, n - clicks);
    });
  };
  const double below = src.cdf(scale);
  const double m00 = below + moment(0);
  const double m01 = moment(1);
  const double m11 = moment(2);
  const double mass = m00 + 2.0 * m01 + m11;
  if (!(mass > 1e-300)) throw ZeroAcceptance("mixture post-selection keeps no mass");
  return PostSelectedDistribution({m00 / mass, m01 / mass, m01 / mass, m11 / mass});
}

}  // namespace clickstat
