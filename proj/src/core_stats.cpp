#include "clickstat/core_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "clickstat/error.hpp"

namespace clickstat {
namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kMinRetainedMass = 1e-300;
constexpr double kDegenerateMeanTolerance = 1e-15;

template <class Range>
double neumaier_sum(const Range& values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

template <class Range>
void validate_probabilities(const Range& values, const char* what) {
  for (double v : values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ValidationError(fmt::format("{}: entry {} outside [0, 1]", what, v));
    }
  }
  const double total = neumaier_sum(values);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ValidationError(fmt::format("{}: total mass {:.17g} differs from 1", what, total));
  }
}

template <class Dist>
ClickMoments moments_of(const Dist& dist) {
  double mean = 0.0;
  dist.for_each([&](auto k1, auto k2, double p) { mean += static_cast<double>(k1 + k2) * p; });
  double variance = 0.0;
  dist.for_each([&](auto k1, auto k2, double p) {
    const double dev = static_cast<double>(k1 + k2) - mean;
    variance += dev * dev * p;
  });
  return {mean, variance};
}

// N - <k> summed directly, so it keeps relative precision when the mean
// sits just below N.
template <class Dist>
double headroom_of(const Dist& dist, double n) {
  double headroom = 0.0;
  dist.for_each([&](auto k1, auto k2, double p) { headroom += (n - static_cast<double>(k1 + k2)) * p; });
  return headroom;
}

double q_b(double mean, double headroom, double variance, std::int64_t degree) {
  if (std::abs(mean) <= kDegenerateMeanTolerance || std::abs(headroom) <= kDegenerateMeanTolerance) {
    throw DegenerateMean(fmt::format("mean click number {:.17g} is degenerate for N = {}", mean, degree));
  }
  return static_cast<double>(degree) * variance / (mean * headroom) - 1.0;
}

}  // namespace

MultiplexerConfig::MultiplexerConfig(int depth) : depth_(depth) {
  if (depth < 1 || depth > kMaxDepth) {
    throw ValidationError(fmt::format("multiplexer depth must be in [1, {}], got {}", kMaxDepth, depth));
  }
}

MultiplexerConfig MultiplexerConfig::from_degree(std::int64_t degree) {
  if (degree < 2 || (degree & (degree - 1)) != 0) {
    throw ValidationError(fmt::format("multiplexer degree must be a power of two >= 2, got {}", degree));
  }
  int depth = 0;
  while ((std::int64_t{1} << depth) < degree) ++depth;
  return MultiplexerConfig(depth);
}

std::vector<double> binomial_pmf(std::int64_t trials, double p, double q) {
  if (trials < 0) throw ValidationError("binomial_pmf: negative trial count");
  const auto n = static_cast<std::size_t>(trials);
  std::vector<double> pmf(n + 1, 0.0);
  if (p <= 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (q <= 0.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  const double log_p = std::log(p);
  const double log_q = std::log(q);
  // log C(n, k) accumulated term by term keeps k = 0, 1 exact.
  double log_choose = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      log_choose += std::log(static_cast<double>(n - k + 1) / static_cast<double>(k));
    }
    pmf[k] = std::exp(log_choose + static_cast<double>(k) * log_p +
                      static_cast<double>(n - k) * log_q);
  }
  const double total = neumaier_sum(pmf);
  for (double& v : pmf) v /= total;
  return pmf;
}

JointClickDistribution::JointClickDistribution(MultiplexerConfig config, std::vector<double> table)
    : config_(config), table_(std::move(table)) {
  if (config_.depth() > kMaxDenseDepth) {
    throw ValidationError(fmt::format("dense joint tables support depth <= {}, got {}",
                                      kMaxDenseDepth, config_.depth()));
  }
  const auto n = static_cast<std::size_t>(extent());
  if (table_.size() != n * n) {
    throw ValidationError(fmt::format("joint table must have {} entries, got {}", n * n, table_.size()));
  }
  validate_probabilities(table_, "joint click distribution");
}

JointClickDistribution JointClickDistribution::from_marginals(MultiplexerConfig config,
                                                              std::span<const double> first,
                                                              std::span<const double> second) {
  const auto n = static_cast<std::size_t>(config.branch_size() + 1);
  if (first.size() != n || second.size() != n) {
    throw ValidationError("branch marginals must have N/2 + 1 entries");
  }
  std::vector<double> table(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) table[i * n + j] = first[i] * second[j];
  }
  return JointClickDistribution(config, std::move(table));
}

JointClickDistribution JointClickDistribution::point_mass(MultiplexerConfig config, std::int64_t k1,
                                                          std::int64_t k2) {
  const std::int64_t n = config.branch_size() + 1;
  if (k1 < 0 || k2 < 0 || k1 >= n || k2 >= n) {
    throw ValidationError("point mass outside the click range of a branch");
  }
  std::vector<double> table(static_cast<std::size_t>(n * n), 0.0);
  table[static_cast<std::size_t>(k1 * n + k2)] = 1.0;
  return JointClickDistribution(config, std::move(table));
}

double JointClickDistribution::at(std::int64_t k1, std::int64_t k2) const {
  const std::int64_t n = extent();
  if (k1 < 0 || k2 < 0 || k1 >= n || k2 >= n) return 0.0;
  return table_[static_cast<std::size_t>(k1 * n + k2)];
}

std::vector<double> JointClickDistribution::marginal(int branch) const {
  std::vector<double> out(static_cast<std::size_t>(extent()), 0.0);
  for_each([&](std::int64_t k1, std::int64_t k2, double p) {
    out[static_cast<std::size_t>(branch == 0 ? k1 : k2)] += p;
  });
  return out;
}

BranchShare BranchShare::from_odds(double odds) {
  if (!(odds >= 0.0)) throw ValidationError("branch odds must be non-negative");
  if (std::isinf(odds)) return {1.0, 0.0};
  const double none = 1.0 / (odds + 1.0);
  return {odds * none, none};
}

BranchShare BranchShare::from_detector(std::int64_t branch_size, double p, double q) {
  const double clicks = static_cast<double>(branch_size) * p;
  const double denom = clicks + q;
  return {clicks / denom, q / denom};
}

PostSelectedDistribution::PostSelectedDistribution(std::array<double, 4> table) : table_(table) {
  validate_probabilities(table_, "post-selected distribution");
}

PostSelectedDistribution PostSelectedDistribution::product_form(BranchShare share) {
  const double s = share.click;
  const double r = share.none;
  return PostSelectedDistribution({r * r, r * s, s * r, s * s});
}

double PostSelectedDistribution::at(int k1, int k2) const {
  if (k1 < 0 || k1 > 1 || k2 < 0 || k2 > 1) return 0.0;
  return table_[static_cast<std::size_t>(2 * k1 + k2)];
}

PostSelectedDistribution post_select(const JointClickDistribution& dist) {
  std::array<double, 4> kept{};
  const std::int64_t limit = std::min<std::int64_t>(dist.extent(), 2);
  for (std::int64_t k1 = 0; k1 < limit; ++k1) {
    for (std::int64_t k2 = 0; k2 < limit; ++k2) kept[static_cast<std::size_t>(2 * k1 + k2)] = dist.at(k1, k2);
  }
  const double mass = neumaier_sum(kept);
  if (!(mass > kMinRetainedMass)) {
    throw ZeroAcceptance(fmt::format("post-selection keeps mass {:.3g}", mass));
  }
  for (double& v : kept) v /= mass;
  return PostSelectedDistribution(kept);
}

PostSelectedDistribution post_select(const PostSelectedDistribution& dist) {
  std::array<double, 4> kept = dist.table();
  const double mass = neumaier_sum(kept);
  if (!(mass > kMinRetainedMass)) throw ZeroAcceptance("post-selection keeps no mass");
  for (double& v : kept) v /= mass;
  return PostSelectedDistribution(kept);
}

ClickMoments total_click_moments(const JointClickDistribution& dist) { return moments_of(dist); }
ClickMoments total_click_moments(const PostSelectedDistribution& dist) { return moments_of(dist); }

double sub_binomiality(ClickMoments moments, std::int64_t degree) {
  return q_b(moments.mean, static_cast<double>(degree) - moments.mean, moments.variance, degree);
}

double sub_binomiality(const JointClickDistribution& dist) {
  const ClickMoments m = moments_of(dist);
  const std::int64_t degree = dist.config().degree();
  return q_b(m.mean, headroom_of(dist, static_cast<double>(degree)), m.variance, degree);
}

double sub_binomiality(const PostSelectedDistribution& dist, const MultiplexerConfig& config) {
  const ClickMoments m = moments_of(dist);
  return q_b(m.mean, headroom_of(dist, static_cast<double>(config.degree())), m.variance, config.degree());
}

double coincident_probability(const PostSelectedDistribution& dist) { return dist.at(1, 1); }

MeasureReport measure(const PostSelectedDistribution& dist, const MultiplexerConfig& config) {
  const ClickMoments m = moments_of(dist);
  return {m.mean, m.variance, sub_binomiality(dist, config), coincident_probability(dist)};
}

namespace product_form {

double sub_binomiality(BranchShare share, const MultiplexerConfig& config) {
  if (config.degree() == 2 || share.click == 0.0) return 0.0;
  const double reduced = 1.0 - 2.0 / static_cast<double>(config.degree());
  // The odds form divided through by C + 1.
  return -(reduced * share.click) / (reduced * share.click + share.none);
}

double coincident_probability(BranchShare share) { return share.click * share.click; }

}  // namespace product_form

}  // namespace clickstat
