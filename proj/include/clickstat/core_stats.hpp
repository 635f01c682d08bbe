#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace clickstat {

/// Balanced splitter tree of depth m feeding N = 2^m on/off detectors.
/// The first splitter defines two branches of N/2 detectors each.
class MultiplexerConfig {
 public:
  static constexpr int kMaxDepth = 62;

  explicit MultiplexerConfig(int depth);

  /// Throws ValidationError unless `degree` is a power of two >= 2.
  static MultiplexerConfig from_degree(std::int64_t degree);

  int depth() const noexcept { return depth_; }
  std::int64_t degree() const noexcept { return std::int64_t{1} << depth_; }
  std::int64_t branch_size() const noexcept { return degree() / 2; }

  friend bool operator==(const MultiplexerConfig&, const MultiplexerConfig&) = default;

 private:
  int depth_;
};

/// Click and no-click probability of one on/off detector.
struct ClickProbabilities {
  double click = 0.0;
  double no_click = 1.0;
};

/// Probabilities for an arbitrary number of successes out of `trials`
/// Bernoulli events.  Both `p` and `q = 1 - p` are passed so callers can
/// supply each with full relative precision.
std::vector<double> binomial_pmf(std::int64_t trials, double p, double q);

/// Dense two-branch joint table Pr(k1, k2), k_i in [0, N/2].
class JointClickDistribution {
 public:
  /// Dense tables are (N/2 + 1)^2 doubles; deeper trees are rejected.
  static constexpr int kMaxDenseDepth = 12;

  /// Row-major table indexed by k1 * (N/2 + 1) + k2.  Validates entries in
  /// [0, 1] and total mass 1 within 1e-12.
  JointClickDistribution(MultiplexerConfig config, std::vector<double> table);

  /// Independent branches: Pr(k1, k2) = first[k1] * second[k2].
  static JointClickDistribution from_marginals(MultiplexerConfig config,
                                               std::span<const double> first,
                                               std::span<const double> second);

  static JointClickDistribution point_mass(MultiplexerConfig config,
                                           std::int64_t k1, std::int64_t k2);

  const MultiplexerConfig& config() const noexcept { return config_; }
  std::int64_t extent() const noexcept { return config_.branch_size() + 1; }
  double at(std::int64_t k1, std::int64_t k2) const;
  std::span<const double> table() const noexcept { return table_; }

  /// Marginal of one branch (0 or 1).
  std::vector<double> marginal(int branch) const;

  template <class F>
  void for_each(F&& visit) const {
    const std::int64_t n = extent();
    for (std::int64_t k1 = 0; k1 < n; ++k1) {
      for (std::int64_t k2 = 0; k2 < n; ++k2) {
        visit(k1, k2, table_[static_cast<std::size_t>(k1 * n + k2)]);
      }
    }
  }

 private:
  MultiplexerConfig config_;
  std::vector<double> table_;
};

/// Click share of one branch after post-selection, s = C/(C+1), together
/// with its complement 1/(C+1).  Carrying both keeps full precision when
/// one of them is tiny.
struct BranchShare {
  double click = 0.0;
  double none = 1.0;

  /// From branch odds C in [0, inf]; C = inf gives {1, 0}.
  static BranchShare from_odds(double odds);
  /// From per-detector click/no-click probabilities and branch size b:
  /// s = b p / (b p + q).
  static BranchShare from_detector(std::int64_t branch_size, double p, double q);
};

/// Post-selected 2x2 table over k1, k2 in {0, 1}.
class PostSelectedDistribution {
 public:
  /// Entries indexed 2 * k1 + k2.  Validates entries in [0, 1] and total
  /// mass 1 within 1e-12.
  explicit PostSelectedDistribution(std::array<double, 4> table);

  /// Pr(k1, k2) = C^(k1 + k2) / (C + 1)^2, written through the click share.
  static PostSelectedDistribution product_form(BranchShare share);

  double at(int k1, int k2) const;
  const std::array<double, 4>& table() const noexcept { return table_; }

  template <class F>
  void for_each(F&& visit) const {
    for (int k1 = 0; k1 < 2; ++k1) {
      for (int k2 = 0; k2 < 2; ++k2) visit(k1, k2, table_[static_cast<std::size_t>(2 * k1 + k2)]);
    }
  }

 private:
  std::array<double, 4> table_;
};

struct ClickMoments {
  double mean = 0.0;
  double variance = 0.0;
};

struct MeasureReport {
  double mean_clicks = 0.0;
  double variance_clicks = 0.0;
  double q_b = 0.0;
  double cp = 0.0;
};

/// Restriction to k1, k2 <= 1, renormalized.  Throws ZeroAcceptance if the
/// retained mass is <= 1e-300.
PostSelectedDistribution post_select(const JointClickDistribution& dist);
PostSelectedDistribution post_select(const PostSelectedDistribution& dist);

/// Mean and variance of the total click number k = k1 + k2.
ClickMoments total_click_moments(const JointClickDistribution& dist);
ClickMoments total_click_moments(const PostSelectedDistribution& dist);

/// Q_B = N var / (mean (N - mean)) - 1.  Throws DegenerateMean if the mean
/// is within 1e-15 of 0 or N.
double sub_binomiality(ClickMoments moments, std::int64_t degree);
double sub_binomiality(const JointClickDistribution& dist);
double sub_binomiality(const PostSelectedDistribution& dist, const MultiplexerConfig& config);

/// Mass with both branches clicking; for a post-selected table this is
/// the (1, 1) entry.
double coincident_probability(const PostSelectedDistribution& dist);

MeasureReport measure(const PostSelectedDistribution& dist, const MultiplexerConfig& config);

/// Closed forms of the post-selected product-form table shared by the
/// quantum and classical models.
namespace product_form {

/// -(1 - 2/N) C / ((1 - 2/N) C + 1); identically 0 for N = 2 or C = 0.
double sub_binomiality(BranchShare share, const MultiplexerConfig& config);

/// (C / (C + 1))^2.
double coincident_probability(BranchShare share);

}  // namespace product_form

}  // namespace clickstat
