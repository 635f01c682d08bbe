#include "clickstat/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "clickstat/core_stats.hpp"

namespace clickstat {
namespace {

// Pearson statistic of `draws` against Binomial(n, p), pooling cells whose
// expected count is below 5.
template <class Draw>
double chi_square(std::int64_t n, double p, int draws, Draw&& draw) {
  const auto pmf = binomial_pmf(n, p, 1.0 - p);
  std::vector<double> observed(pmf.size(), 0.0);
  for (int i = 0; i < draws; ++i) observed[static_cast<std::size_t>(draw())] += 1.0;
  double stat = 0.0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) {
    pooled_obs += observed[k];
    pooled_exp += pmf[k] * draws;
    if (pooled_exp >= 5.0) {
      stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      pooled_obs = pooled_exp = 0.0;
    }
  }
  if (pooled_exp > 0.0) stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
  return stat;
}

TEST(CounterRng, IsDeterministicPerStream) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  CounterRng c(42, 8);
  CounterRng d(43, 7);
  int same_c = 0;
  int same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    same_c += x == c();
    same_d += x == d();
  }
  EXPECT_EQ(same_c, 0);
  EXPECT_EQ(same_d, 0);
}

TEST(CounterRng, UniformInUnitInterval) {
  CounterRng rng(1, 0);
  double sum = 0.0;
  constexpr int kDraws = 200000;
  for (int i = 0; i < kDraws; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of U(0,1) has standard error 1/sqrt(12 n).
  EXPECT_NEAR(sum / kDraws, 0.5, 5.0 / std::sqrt(12.0 * kDraws));
}

TEST(SampleBinomial, EdgeProbabilities) {
  CounterRng rng(3, 0);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_binomial(16, 0.0, 1.0, rng), 0);
    EXPECT_EQ(sample_binomial(16, 1.0, 0.0, rng), 16);
    EXPECT_EQ(sample_binomial(0, 0.5, 0.5, rng), 0);
    EXPECT_EQ(sample_bernoulli_sum(16, 0.0, 1.0, rng), 0);
    EXPECT_EQ(sample_bernoulli_sum(16, 1.0, 0.0, rng), 16);
  }
}

TEST(SampleBinomial, InRange) {
  CounterRng rng(5, 0);
  for (int i = 0; i < 10000; ++i) {
    const auto k = sample_binomial(1024, 0.4, 0.6, rng);
    ASSERT_GE(k, 0);
    ASSERT_LE(k, 1024);
  }
}

TEST(BinomialSampler, MatchesPerCallSampler) {
  for (auto [n, p] : {std::pair<std::int64_t, double>{1, 0.3}, {4, 0.221}, {16, 0.97}, {512, 0.5}, {2048, 0.999},
                      {8, 0.0}, {8, 1.0}}) {
    const BinomialSampler sampler(n, p, 1.0 - p);
    CounterRng a(21, 4);
    CounterRng b(21, 4);
    for (int i = 0; i < 2000; ++i) ASSERT_EQ(sampler(a), sample_binomial(n, p, 1.0 - p, b)) << n << " " << p;
  }
}

struct BinomialCase {
  std::int64_t n;
  double p;
};

class SamplerAgreement : public ::testing::TestWithParam<BinomialCase> {};

// Both samplers follow the exact pmf; df <= 16, so 45 is beyond the 99.9%
// quantile of chi-square.
TEST_P(SamplerAgreement, BothMatchPmf) {
  const auto [n, p] = GetParam();
  CounterRng fast(11, 1);
  CounterRng slow(11, 2);
  constexpr int kDraws = 100000;
  EXPECT_LT(chi_square(n, p, kDraws, [&] { return sample_binomial(n, p, 1.0 - p, fast); }), 45.0);
  EXPECT_LT(chi_square(n, p, kDraws, [&] { return sample_bernoulli_sum(n, p, 1.0 - p, slow); }), 45.0);
}

INSTANTIATE_TEST_SUITE_P(SmallBranches, SamplerAgreement,
                         ::testing::Values(BinomialCase{1, 0.3}, BinomialCase{2, 0.5}, BinomialCase{4, 0.221},
                                           BinomialCase{8, 0.95}, BinomialCase{16, 0.03},
                                           BinomialCase{16, 0.7}, BinomialCase{64, 0.5}));

}  // namespace
}  // namespace clickstat
