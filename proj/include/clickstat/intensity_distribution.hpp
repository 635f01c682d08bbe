#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace clickstat {

/// Law p(I) of the classical input intensity.  All intensities are in units
/// of the detector threshold.
class IntensityDistribution {
 public:
  struct Delta {
    double intensity;
  };
  struct Uniform {
    double lower;
    double upper;
  };
  struct Exponential {
    double mean;
  };
  /// Piecewise-linear density through the nodes, zero outside them.
  struct Tabulated {
    std::vector<double> intensity;
    std::vector<double> density;
    std::vector<double> cumulative;  // CDF at each node
    std::string origin;              // file name or "inline"
  };
  using Kind = std::variant<Delta, Uniform, Exponential, Tabulated>;

  static IntensityDistribution delta(double intensity);
  static IntensityDistribution uniform(double lower, double upper);
  static IntensityDistribution exponential(double mean);

  /// Nodes must be strictly increasing in intensity with non-negative
  /// densities.  The trapezoid integral is renormalized to 1 if it is
  /// within 1e-6 of 1; otherwise ValidationError.
  static IntensityDistribution tabulated(std::vector<std::pair<double, double>> nodes,
                                         std::string origin = "inline");

  /// Two whitespace- or comma-separated columns (intensity, density) per
  /// line; '#' starts a comment.  IoError if the file cannot be read.
  static IntensityDistribution load_tabulated(const std::filesystem::path& path);

  /// delta:<v> | uniform:<a>,<b> | exp:<mu> | file:<path>
  static IntensityDistribution parse(std::string_view spec);

  const Kind& kind() const noexcept { return kind_; }
  bool is_delta() const noexcept { return std::holds_alternative<Delta>(kind_); }

  /// Identifier used in output tables, e.g. "delta:100" or "exp:50".
  std::string id() const;
  double mean() const;
  /// Probability that I <= x.
  double cdf(double x) const;
  /// Inverse CDF; `u` in [0, 1).
  double quantile(double u) const;
  /// No probability mass lies above this intensity (may be +inf).
  double support_upper() const;

 private:
  explicit IntensityDistribution(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

}  // namespace clickstat
