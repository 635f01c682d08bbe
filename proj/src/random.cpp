#include "clickstat/random.hpp"

#include <cmath>
#include <random>

namespace clickstat {
namespace {

constexpr double kMinLogPmf0 = -700.0;

std::int64_t invert(std::int64_t n, double pmf0, double ratio, CounterRng& rng) {
  double pmf = pmf0;
  double cdf = pmf;
  const double u = rng.uniform();
  std::int64_t k = 0;
  while (u >= cdf && k < n) {
    pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
    ++k;
    cdf += pmf;
  }
  return k;
}

// Successes out of n with success probability `p <= 1/2`.
std::int64_t invert_light_tail(std::int64_t n, double p, double q, CounterRng& rng) {
  if (p <= 0.0) return 0;
  const double log_pmf0 = static_cast<double>(n) * std::log(q);
  if (log_pmf0 < kMinLogPmf0) {
    std::binomial_distribution<std::int64_t> dist(n, p);
    return dist(rng);
  }
  return invert(n, std::exp(log_pmf0), p / q, rng);
}

}  // namespace

std::int64_t sample_binomial(std::int64_t n, double p, double q, CounterRng& rng) {
  if (p <= q) return invert_light_tail(n, p, q, rng);
  return n - invert_light_tail(n, q, p, rng);
}

BinomialSampler::BinomialSampler(std::int64_t n, double p, double q) : n_(n), flipped_(p > q) {
  light_ = flipped_ ? q : p;
  const double heavy = flipped_ ? p : q;
  if (light_ <= 0.0) return;
  const double log_pmf0 = static_cast<double>(n) * std::log(heavy);
  fallback_ = log_pmf0 < kMinLogPmf0;
  pmf0_ = std::exp(log_pmf0);
  ratio_ = light_ / heavy;
}

std::int64_t BinomialSampler::operator()(CounterRng& rng) const {
  std::int64_t k = 0;
  if (light_ <= 0.0) {
    k = 0;
  } else if (fallback_) {
    std::binomial_distribution<std::int64_t> dist(n_, light_);
    k = dist(rng);
  } else {
    k = invert(n_, pmf0_, ratio_, rng);
  }
  return flipped_ ? n_ - k : k;
}

std::int64_t sample_bernoulli_sum(std::int64_t n, double p, double q, CounterRng& rng) {
  std::int64_t clicks = 0;
  if (p <= q) {
    for (std::int64_t i = 0; i < n; ++i) clicks += rng.uniform() < p ? 1 : 0;
  } else {
    clicks = n;
    for (std::int64_t i = 0; i < n; ++i) clicks -= rng.uniform() < q ? 1 : 0;
  }
  return clicks;
}

}  // namespace clickstat
